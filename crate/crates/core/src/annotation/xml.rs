//! Corpus files: `<corpus>` of `<pair>`s with inline TimeML spans, and
//! the bare `<DOC>` input format.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use quick_xml::escape::{escape, partial_escape};
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;
use thiserror::Error;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusErrorKind {
    Malformed(String),
    UnknownTag(String),
    UnknownAttribute { tag: String, attr: String },
    MissingAttribute { tag: String, attr: String },
    BadValue { attr: String, value: String, reason: String },
    DanglingReference(String),
    DuplicateId(String),
    Uninstantiated(String),
    Structure(String),
}

impl fmt::Display for CorpusErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusErrorKind::Malformed(m) => write!(f, "malformed XML: {m}"),
            CorpusErrorKind::UnknownTag(t) => write!(f, "unknown tag <{t}>"),
            CorpusErrorKind::UnknownAttribute { tag, attr } => {
                write!(f, "unknown attribute `{attr}` on <{tag}>")
            }
            CorpusErrorKind::MissingAttribute { tag, attr } => {
                write!(f, "<{tag}> lacks required attribute `{attr}`")
            }
            CorpusErrorKind::BadValue { attr, value, reason } => {
                write!(f, "bad value `{value}` for `{attr}`: {reason}")
            }
            CorpusErrorKind::DanglingReference(id) => write!(f, "dangling reference to `{id}`"),
            CorpusErrorKind::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            CorpusErrorKind::Uninstantiated(id) => write!(f, "event `{id}` has no MAKEINSTANCE"),
            CorpusErrorKind::Structure(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct CorpusError {
    pub pair: Option<u32>,
    pub offset: u64,
    pub kind: CorpusErrorKind,
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(id) = self.pair {
            write!(f, "pair {id}, ")?;
        }
        write!(f, "byte {}: {}", self.offset, self.kind)
    }
}

struct Attrs {
    tag: String,
    map: BTreeMap<String, String>,
    order: Vec<(String, String)>,
}

impl Attrs {
    fn take(&mut self, name: &str) -> Option<String> {
        self.map.remove(name)
    }
}

struct Parser<'a> {
    reader: Reader<&'a [u8]>,
    pair: Option<u32>,
}

impl<'a> Parser<'a> {
    fn new(input: &'a [u8]) -> Self {
        Parser {
            reader: Reader::from_reader(input),
            pair: None,
        }
    }

    fn error(&self, kind: CorpusErrorKind) -> CorpusError {
        CorpusError {
            pair: self.pair,
            offset: self.reader.buffer_position(),
            kind,
        }
    }

    fn error_at(&self, offset: u64, kind: CorpusErrorKind) -> CorpusError {
        CorpusError {
            pair: self.pair,
            offset,
            kind,
        }
    }

    fn next(&mut self) -> Result<XmlEvent<'a>, CorpusError> {
        loop {
            let ev = self
                .reader
                .read_event()
                .map_err(|e| self.error(CorpusErrorKind::Malformed(e.to_string())))?;
            match ev {
                XmlEvent::Comment(_)
                | XmlEvent::Decl(_)
                | XmlEvent::PI(_)
                | XmlEvent::DocType(_) => continue,
                other => return Ok(other),
            }
        }
    }

    fn text(&self, ev: &XmlEvent<'a>) -> Result<String, CorpusError> {
        match ev {
            XmlEvent::Text(t) => t
                .unescape()
                .map(Cow::into_owned)
                .map_err(|e| self.error(CorpusErrorKind::Malformed(e.to_string()))),
            XmlEvent::CData(c) => Ok(String::from_utf8_lossy(c).into_owned()),
            _ => Ok(String::new()),
        }
    }

    fn attrs(&self, start: &BytesStart<'_>) -> Result<Attrs, CorpusError> {
        let tag = String::from_utf8_lossy(start.name().as_ref()).into_owned();
        let mut map = BTreeMap::new();
        let mut order = Vec::new();
        for a in start.attributes() {
            let a = a.map_err(|e| self.error(CorpusErrorKind::Malformed(e.to_string())))?;
            let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
            let value = a
                .unescape_value()
                .map_err(|e| self.error(CorpusErrorKind::Malformed(e.to_string())))?
                .into_owned();
            if map.insert(key.clone(), value.clone()).is_some() {
                return Err(self.error(CorpusErrorKind::Malformed(format!(
                    "attribute `{key}` repeated on <{tag}>"
                ))));
            }
            order.push((key, value));
        }
        Ok(Attrs { tag, map, order })
    }

    fn required(&self, a: &mut Attrs, name: &str) -> Result<String, CorpusError> {
        a.take(name).ok_or_else(|| {
            self.error(CorpusErrorKind::MissingAttribute {
                tag: a.tag.clone(),
                attr: name.to_string(),
            })
        })
    }

    fn finish(&self, a: Attrs) -> Result<(), CorpusError> {
        match a.map.into_keys().next() {
            Some(attr) => Err(self.error(CorpusErrorKind::UnknownAttribute { tag: a.tag, attr })),
            None => Ok(()),
        }
    }

    fn parse_value<T: std::str::FromStr>(&self, attr: &str, value: &str) -> Result<T, CorpusError>
    where
        T::Err: fmt::Display,
    {
        value.parse().map_err(|e: T::Err| {
            self.error(CorpusErrorKind::BadValue {
                attr: attr.to_string(),
                value: value.to_string(),
                reason: e.to_string(),
            })
        })
    }

    fn optional_value(&self, attr: &str, raw: &str) -> Result<Option<TemporalValue>, CorpusError> {
        if raw.trim().is_empty() {
            Ok(None)
        } else {
            self.parse_value(attr, raw).map(Some)
        }
    }

    fn unknown_tag(&self, name: &[u8]) -> CorpusError {
        self.error(CorpusErrorKind::UnknownTag(String::from_utf8_lossy(name).into_owned()))
    }

    fn expect_blank(&self, ev: &XmlEvent<'a>) -> Result<(), CorpusError> {
        let text = self.text(ev)?;
        if text.trim().is_empty() {
            Ok(())
        } else {
            Err(self.error(CorpusErrorKind::Structure(format!(
                "unexpected text `{}`",
                text.trim()
            ))))
        }
    }
}

#[derive(Default)]
struct PairIds {
    seen: BTreeSet<String>,
    events: BTreeSet<String>,
    times: BTreeSet<String>,
    instances: BTreeSet<String>,
}

impl PairIds {
    fn claim(&mut self, p: &Parser<'_>, id: &str) -> Result<(), CorpusError> {
        if self.seen.insert(id.to_string()) {
            Ok(())
        } else {
            Err(p.error(CorpusErrorKind::DuplicateId(id.to_string())))
        }
    }
}

/// Reads a corpus file.
pub fn parse_corpus(input: &[u8]) -> Result<Corpus, CorpusError> {
    let mut p = Parser::new(input);
    let reference = loop {
        match p.next()? {
            XmlEvent::Start(s) if s.name().as_ref() == b"corpus" => {
                let mut a = p.attrs(&s)?;
                let reference = match a.take("reference") {
                    Some(r) => Some(p.parse_value::<CalendarDate>("reference", &r)?),
                    None => None,
                };
                p.finish(a)?;
                break reference;
            }
            XmlEvent::Empty(s) if s.name().as_ref() == b"corpus" => {
                return Ok(Corpus {
                    reference: None,
                    pairs: Vec::new(),
                })
            }
            XmlEvent::Start(s) | XmlEvent::Empty(s) => return Err(p.unknown_tag(s.name().as_ref())),
            XmlEvent::Eof => {
                return Err(p.error(CorpusErrorKind::Structure("no <corpus> element".into())))
            }
            ev => p.expect_blank(&ev)?,
        }
    };

    let mut pairs = Vec::new();
    let mut ids = BTreeSet::new();
    loop {
        match p.next()? {
            XmlEvent::Start(s) if s.name().as_ref() == b"pair" => {
                let start = p.reader.buffer_position();
                let pair = parse_pair(&mut p, &s)?;
                if !ids.insert(pair.id) {
                    return Err(p.error_at(start, CorpusErrorKind::DuplicateId(pair.id.to_string())));
                }
                pairs.push(pair);
                p.pair = None;
            }
            XmlEvent::End(e) if e.name().as_ref() == b"corpus" => break,
            XmlEvent::Start(s) | XmlEvent::Empty(s) => return Err(p.unknown_tag(s.name().as_ref())),
            XmlEvent::Eof => {
                return Err(p.error(CorpusErrorKind::Malformed("unclosed <corpus>".into())))
            }
            ev => p.expect_blank(&ev)?,
        }
    }
    loop {
        match p.next()? {
            XmlEvent::Eof => break,
            XmlEvent::Start(s) | XmlEvent::Empty(s) => return Err(p.unknown_tag(s.name().as_ref())),
            ev => p.expect_blank(&ev)?,
        }
    }
    Ok(Corpus { reference, pairs })
}

enum Pending {
    Instance(u64, String),
    Link(u64, LinkEnd),
    Anchor(u64, String),
}

fn parse_pair(p: &mut Parser<'_>, start: &BytesStart<'_>) -> Result<AnnotatedPair, CorpusError> {
    let mut a = p.attrs(start)?;
    let id_raw = p.required(&mut a, "id")?;
    let id: u32 = p.parse_value("id", &id_raw)?;
    p.pair = Some(id);
    let value = p.required(&mut a, "value")?;
    let gold = match value.to_ascii_uppercase().as_str() {
        "TRUE" => true,
        "FALSE" => false,
        _ => {
            return Err(p.error(CorpusErrorKind::BadValue {
                attr: "value".into(),
                value,
                reason: "expected TRUE or FALSE".into(),
            }))
        }
    };
    let task = a.take("task");
    p.finish(a)?;

    let mut ids = PairIds::default();
    let mut pending = Vec::new();
    let mut t = None;
    let mut h = None;
    let mut instances = Vec::new();
    let mut tlinks = Vec::new();
    let mut slinks = Vec::new();
    let mut alinks = Vec::new();

    loop {
        let ev = p.next()?;
        let (s, empty) = match ev {
            XmlEvent::Start(s) => (s, false),
            XmlEvent::Empty(s) => (s, true),
            XmlEvent::End(e) if e.name().as_ref() == b"pair" => break,
            XmlEvent::End(e) => return Err(p.unknown_tag(e.name().as_ref())),
            XmlEvent::Eof => {
                return Err(p.error(CorpusErrorKind::Malformed("unclosed <pair>".into())))
            }
            ev => {
                p.expect_blank(&ev)?;
                continue;
            }
        };
        let offset = p.reader.buffer_position();
        let name = s.name().as_ref().to_vec();
        match name.as_slice() {
            b"t" | b"h" => {
                let slot = if name == b"t" { &mut t } else { &mut h };
                if slot.is_some() {
                    return Err(p.error(CorpusErrorKind::Structure(format!(
                        "second <{}> in pair",
                        String::from_utf8_lossy(&name)
                    ))));
                }
                p.finish(p.attrs(&s)?)?;
                let seg = if empty {
                    Segment::default()
                } else {
                    parse_segment(p, &name, &mut ids, &mut pending)?
                };
                *slot = Some(seg);
                continue;
            }
            b"MAKEINSTANCE" => {
                let mut a = p.attrs(&s)?;
                let eiid = p.required(&mut a, "eiid")?;
                let event_id = p.required(&mut a, "eventID")?;
                let polarity = match a.take("polarity") {
                    Some(v) => p.parse_value("polarity", &v)?,
                    None => Polarity::Pos,
                };
                let mut field = |n: &str| a.take(n).unwrap_or_else(|| "NONE".to_string());
                let inst = EventInstance {
                    tense: field("tense"),
                    aspect: field("aspect"),
                    pos: field("pos"),
                    eiid,
                    event_id,
                    polarity,
                };
                p.finish(a)?;
                ids.claim(p, &inst.eiid)?;
                ids.instances.insert(inst.eiid.clone());
                pending.push(Pending::Instance(offset, inst.event_id.clone()));
                instances.push(inst);
            }
            b"TLINK" => {
                let mut a = p.attrs(&s)?;
                let lid = a.take("lid");
                let from = end_attr(p, &mut a, "eventInstanceID", "timeID")?;
                let to = end_attr(p, &mut a, "relatedToEventInstance", "relatedToTime")?;
                let rel_raw = p.required(&mut a, "relType")?;
                let rel = p.parse_value("relType", &rel_raw)?;
                let mut extra = Vec::new();
                for key in ["origin", "rule", "signalID", "syntax"] {
                    if let Some(v) = a.take(key) {
                        extra.push((key.to_string(), v));
                    }
                }
                p.finish(a)?;
                if let Some(l) = &lid {
                    ids.claim(p, l)?;
                }
                pending.push(Pending::Link(offset, from.clone()));
                pending.push(Pending::Link(offset, to.clone()));
                tlinks.push(TLink {
                    lid,
                    from,
                    to,
                    rel,
                    extra,
                });
            }
            b"SLINK" => {
                let mut a = p.attrs(&s)?;
                let lid = a.take("lid");
                let rel_raw = p.required(&mut a, "relType")?;
                let rel = p.parse_value("relType", &rel_raw)?;
                let from = p.required(&mut a, "eventInstanceID")?;
                let to = p.required(&mut a, "subordinatedEventInstance")?;
                p.finish(a)?;
                if let Some(l) = &lid {
                    ids.claim(p, l)?;
                }
                pending.push(Pending::Link(offset, LinkEnd::Instance(from.clone())));
                pending.push(Pending::Link(offset, LinkEnd::Instance(to.clone())));
                slinks.push(SLink { lid, rel, from, to });
            }
            b"ALINK" => {
                let a = p.attrs(&s)?;
                alinks.push(ALink { attrs: a.order });
            }
            _ => return Err(p.unknown_tag(&name)),
        }
        if !empty {
            match p.next()? {
                XmlEvent::End(e) if e.name().as_ref() == name.as_slice() => {}
                _ => {
                    return Err(p.error(CorpusErrorKind::Structure(format!(
                        "<{}> must be empty",
                        String::from_utf8_lossy(&name)
                    ))))
                }
            }
        }
    }

    for item in pending {
        match item {
            Pending::Instance(off, eid) if !ids.events.contains(&eid) => {
                return Err(p.error_at(off, CorpusErrorKind::DanglingReference(eid)))
            }
            Pending::Link(off, LinkEnd::Instance(id)) if !ids.instances.contains(&id) => {
                return Err(p.error_at(off, CorpusErrorKind::DanglingReference(id)))
            }
            Pending::Link(off, LinkEnd::Time(id)) | Pending::Anchor(off, id)
                if !ids.times.contains(&id) =>
            {
                return Err(p.error_at(off, CorpusErrorKind::DanglingReference(id)))
            }
            _ => {}
        }
    }
    let end = p.reader.buffer_position();
    let (t, h) = match (t, h) {
        (Some(t), Some(h)) => (t, h),
        _ => {
            return Err(p.error_at(
                end,
                CorpusErrorKind::Structure("pair needs both <t> and <h>".into()),
            ))
        }
    };
    for eid in &ids.events {
        if !instances.iter().any(|i| &i.event_id == eid) {
            return Err(p.error_at(end, CorpusErrorKind::Uninstantiated(eid.clone())));
        }
    }
    Ok(AnnotatedPair {
        id,
        gold,
        task,
        t,
        h,
        instances,
        tlinks,
        slinks,
        alinks,
    })
}

fn end_attr(
    p: &Parser<'_>,
    a: &mut Attrs,
    instance: &str,
    time: &str,
) -> Result<LinkEnd, CorpusError> {
    match (a.take(instance), a.take(time)) {
        (Some(i), None) => Ok(LinkEnd::Instance(i)),
        (None, Some(t)) => Ok(LinkEnd::Time(t)),
        (Some(_), Some(_)) => Err(p.error(CorpusErrorKind::Structure(format!(
            "<{}> has both `{instance}` and `{time}`",
            a.tag
        )))),
        (None, None) => Err(p.error(CorpusErrorKind::MissingAttribute {
            tag: a.tag.clone(),
            attr: format!("{instance}|{time}"),
        })),
    }
}

fn parse_segment(
    p: &mut Parser<'_>,
    tag: &[u8],
    ids: &mut PairIds,
    pending: &mut Vec<Pending>,
) -> Result<Segment, CorpusError> {
    let mut spans: Vec<Span> = Vec::new();
    loop {
        let ev = p.next()?;
        match &ev {
            XmlEvent::Text(_) | XmlEvent::CData(_) => {
                let text = p.text(&ev)?;
                match spans.last_mut() {
                    Some(Span::Text(prev)) => prev.push_str(&text),
                    _ if text.is_empty() => {}
                    _ => spans.push(Span::Text(text)),
                }
            }
            XmlEvent::End(e) if e.name().as_ref() == tag => break,
            XmlEvent::End(e) => return Err(p.unknown_tag(e.name().as_ref())),
            XmlEvent::Start(s) | XmlEvent::Empty(s) => {
                let empty = matches!(ev, XmlEvent::Empty(_));
                let offset = p.reader.buffer_position();
                let name = s.name().as_ref().to_vec();
                let mut a = p.attrs(s)?;
                let span_kind = name.clone();
                let text = if empty { String::new() } else { span_text(p, &name)? };
                let span = match span_kind.as_slice() {
                    b"EVENT" => {
                        let eid = p.required(&mut a, "eid")?;
                        let class_raw = p.required(&mut a, "class")?;
                        let class = p.parse_value("class", &class_raw)?;
                        let stem = a.take("stem");
                        ids.claim(p, &eid)?;
                        ids.events.insert(eid.clone());
                        Span::Event(Event {
                            eid,
                            class,
                            stem,
                            text,
                        })
                    }
                    b"TIMEX3" => {
                        let tid = p.required(&mut a, "tid")?;
                        let ttype_raw = p.required(&mut a, "TYPE")?;
                        let ttype: TimexType = p.parse_value("TYPE", &ttype_raw)?;
                        let raw = p.required(&mut a, "VAL")?;
                        let value = p.optional_value("VAL", &raw)?;
                        if let Some(v) = &value {
                            if !ttype.admits(v) {
                                return Err(p.error(CorpusErrorKind::BadValue {
                                    attr: "VAL".into(),
                                    value: raw,
                                    reason: format!("not a {ttype} value"),
                                }));
                            }
                        }
                        let anchor = a.take("anchorTimeID");
                        if let Some(anchor) = &anchor {
                            pending.push(Pending::Anchor(offset, anchor.clone()));
                        }
                        ids.claim(p, &tid)?;
                        ids.times.insert(tid.clone());
                        Span::Timex(Timex {
                            tid,
                            ttype,
                            value,
                            anchor,
                            text,
                        })
                    }
                    b"NE" => {
                        let ne_raw = p.required(&mut a, "TYPE")?;
                        let ne_type = p.parse_value("TYPE", &ne_raw)?;
                        let raw = p.required(&mut a, "VAL")?;
                        let value = p.optional_value("VAL", &raw)?;
                        let tid = a.take("tid");
                        if let Some(tid) = &tid {
                            ids.claim(p, tid)?;
                            ids.times.insert(tid.clone());
                        }
                        Span::Entity(NamedEntity {
                            ne_type,
                            value,
                            tid,
                            text,
                        })
                    }
                    b"SUBJ" => Span::Subject(text),
                    _ => return Err(p.unknown_tag(&name)),
                };
                p.finish(a)?;
                spans.push(span);
            }
            XmlEvent::Eof => {
                return Err(p.error(CorpusErrorKind::Malformed(format!(
                    "unclosed <{}>",
                    String::from_utf8_lossy(tag)
                ))))
            }
            _ => {}
        }
    }
    Ok(Segment { spans })
}

fn span_text(p: &mut Parser<'_>, tag: &[u8]) -> Result<String, CorpusError> {
    let mut text = String::new();
    loop {
        let ev = p.next()?;
        match &ev {
            XmlEvent::Text(_) | XmlEvent::CData(_) => text.push_str(&p.text(&ev)?),
            XmlEvent::End(e) if e.name().as_ref() == tag => return Ok(text),
            XmlEvent::Start(s) | XmlEvent::Empty(s) => {
                return Err(p.error(CorpusErrorKind::Structure(format!(
                    "<{}> nested inside <{}>",
                    String::from_utf8_lossy(s.name().as_ref()),
                    String::from_utf8_lossy(tag)
                ))))
            }
            XmlEvent::End(e) => return Err(p.unknown_tag(e.name().as_ref())),
            XmlEvent::Eof => {
                return Err(p.error(CorpusErrorKind::Malformed("unexpected end of input".into())))
            }
            _ => {}
        }
    }
}

fn attr(out: &mut String, name: &str, value: &str) {
    let _ = write!(out, " {name}=\"{}\"", escape(value));
}

fn write_segment(out: &mut String, tag: &str, seg: &Segment) {
    let _ = write!(out, "    <{tag}>");
    for span in &seg.spans {
        match span {
            Span::Text(t) => out.push_str(&partial_escape(t)),
            Span::Event(e) => {
                out.push_str("<EVENT");
                attr(out, "eid", &e.eid);
                attr(out, "class", e.class.as_str());
                if let Some(s) = &e.stem {
                    attr(out, "stem", s);
                }
                let _ = write!(out, ">{}</EVENT>", partial_escape(&e.text));
            }
            Span::Timex(t) => {
                out.push_str("<TIMEX3");
                attr(out, "tid", &t.tid);
                attr(out, "TYPE", t.ttype.as_str());
                attr(out, "VAL", &t.value.map(|v| v.to_string()).unwrap_or_default());
                if let Some(a) = &t.anchor {
                    attr(out, "anchorTimeID", a);
                }
                let _ = write!(out, ">{}</TIMEX3>", partial_escape(&t.text));
            }
            Span::Entity(n) => {
                out.push_str("<NE");
                attr(out, "TYPE", n.ne_type.as_str());
                attr(out, "VAL", &n.value.map(|v| v.to_string()).unwrap_or_default());
                if let Some(t) = &n.tid {
                    attr(out, "tid", t);
                }
                let _ = write!(out, ">{}</NE>", partial_escape(&n.text));
            }
            Span::Subject(s) => {
                let _ = write!(out, "<SUBJ>{}</SUBJ>", partial_escape(s));
            }
        }
    }
    let _ = writeln!(out, "</{tag}>");
}

fn write_end(out: &mut String, end: &LinkEnd, instance: &str, time: &str) {
    match end {
        LinkEnd::Instance(i) => attr(out, instance, i),
        LinkEnd::Time(t) => attr(out, time, t),
    }
}

/// Writes a corpus in canonical form. Parsing the output gives back the
/// same corpus.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<corpus");
    if let Some(r) = &corpus.reference {
        attr(&mut out, "reference", &r.to_string());
    }
    out.push_str(">\n");
    for pair in &corpus.pairs {
        out.push_str("  <pair");
        attr(&mut out, "id", &pair.id.to_string());
        attr(&mut out, "value", if pair.gold { "TRUE" } else { "FALSE" });
        if let Some(task) = &pair.task {
            attr(&mut out, "task", task);
        }
        out.push_str(">\n");
        write_segment(&mut out, "t", &pair.t);
        write_segment(&mut out, "h", &pair.h);
        for i in &pair.instances {
            out.push_str("    <MAKEINSTANCE");
            attr(&mut out, "eventID", &i.event_id);
            attr(&mut out, "eiid", &i.eiid);
            attr(&mut out, "tense", &i.tense);
            attr(&mut out, "aspect", &i.aspect);
            attr(&mut out, "pos", &i.pos);
            attr(&mut out, "polarity", i.polarity.as_str());
            out.push_str("/>\n");
        }
        for l in &pair.tlinks {
            out.push_str("    <TLINK");
            if let Some(lid) = &l.lid {
                attr(&mut out, "lid", lid);
            }
            write_end(&mut out, &l.from, "eventInstanceID", "timeID");
            write_end(&mut out, &l.to, "relatedToEventInstance", "relatedToTime");
            attr(&mut out, "relType", l.rel.as_str());
            for (k, v) in &l.extra {
                attr(&mut out, k, v);
            }
            out.push_str("/>\n");
        }
        for l in &pair.slinks {
            out.push_str("    <SLINK");
            if let Some(lid) = &l.lid {
                attr(&mut out, "lid", lid);
            }
            attr(&mut out, "relType", l.rel.as_str());
            attr(&mut out, "eventInstanceID", &l.from);
            attr(&mut out, "subordinatedEventInstance", &l.to);
            out.push_str("/>\n");
        }
        for l in &pair.alinks {
            out.push_str("    <ALINK");
            for (k, v) in &l.attrs {
                attr(&mut out, k, v);
            }
            out.push_str("/>\n");
        }
        out.push_str("  </pair>\n");
    }
    out.push_str("</corpus>\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimpleDocError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("document has no <TEXT>")]
    MissingText,
    #[error("expected one or two sentences, found {0}")]
    SentenceCount(usize),
}

/// A raw `<DOC>` input: one sentence, or a text and its hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDoc {
    pub docid: Option<String>,
    pub sentences: Vec<String>,
}

impl SimpleDoc {
    pub fn text(&self) -> &str {
        &self.sentences[0]
    }

    pub fn hypothesis(&self) -> Option<&str> {
        self.sentences.get(1).map(String::as_str)
    }

    pub fn into_pair(self) -> Result<(String, String), SimpleDocError> {
        let n = self.sentences.len();
        let mut it = self.sentences.into_iter();
        match (it.next(), it.next()) {
            (Some(t), Some(h)) => Ok((t, h)),
            _ => Err(SimpleDocError::SentenceCount(n)),
        }
    }
}

fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let chars: Vec<char> = line.chars().collect();
        let mut start = 0;
        for i in 0..chars.len() {
            let boundary = matches!(chars[i], '.' | '!' | '?')
                && chars.get(i + 1).is_some_and(|c| c.is_whitespace())
                && chars[i + 1..]
                    .iter()
                    .find(|c| !c.is_whitespace())
                    .is_some_and(|c| c.is_uppercase());
            if boundary {
                out.push(chars[start..=i].iter().collect::<String>());
                start = i + 1;
            }
        }
        out.push(chars[start..].iter().collect::<String>());
    }
    out.into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Reads `<DOC><DOCID/><TEXT/></DOC>`.
pub fn parse_simple_xml(input: &[u8]) -> Result<SimpleDoc, SimpleDocError> {
    let mut reader = Reader::from_reader(input);
    let mut docid = None;
    let mut text = None;
    let mut current: Option<Vec<u8>> = None;
    let mut buf = String::new();
    loop {
        match reader.read_event().map_err(|e| SimpleDocError::Xml(e.to_string()))? {
            XmlEvent::Start(s) => {
                let name = s.name().as_ref().to_vec();
                if name == b"DOCID" || name == b"TEXT" {
                    current = Some(name);
                    buf.clear();
                }
            }
            XmlEvent::Text(t) if current.is_some() => {
                buf.push_str(&t.unescape().map_err(|e| SimpleDocError::Xml(e.to_string()))?)
            }
            XmlEvent::CData(c) if current.is_some() => buf.push_str(&String::from_utf8_lossy(&c)),
            XmlEvent::End(e) => match &current {
                Some(n) if n.as_slice() == e.name().as_ref() => {
                    if n == b"DOCID" {
                        docid = Some(buf.trim().to_string());
                    } else {
                        text = Some(buf.clone());
                    }
                    current = None;
                }
                _ => {}
            },
            XmlEvent::Eof => break,
            _ => {}
        }
    }
    let text = text.ok_or(SimpleDocError::MissingText)?;
    let sentences = split_sentences(&text);
    if sentences.is_empty() || sentences.len() > 2 {
        return Err(SimpleDocError::SentenceCount(sentences.len()));
    }
    Ok(SimpleDoc { docid, sentences })
}
