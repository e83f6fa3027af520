//! Granularity-aware calendar values and the arithmetic the rules need:
//! adding durations to dates, measuring gaps, inclusion and tolerant
//! equality.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime, TimeDelta, Timelike};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("invalid calendar date: {0}")]
    InvalidDate(String),
    #[error("cannot apply a {unit} duration to a date known only to the {granularity}")]
    Precision {
        unit: DurationUnit,
        granularity: Granularity,
    },
    #[error("relative value needs a reference date")]
    MissingReference,
    #[error("unsupported tense `{0}`")]
    UnsupportedTense(String),
    #[error("cannot parse temporal value `{0}`")]
    Parse(String),
    #[error("date arithmetic out of range")]
    Overflow,
}

/// Calendar precision, coarsest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Granularity {
    Year,
    Month,
    Day,
    Hour,
    Minute,
}

impl Granularity {
    pub fn coarsest(self, other: Granularity) -> Granularity {
        self.min(other)
    }

    pub fn unit(self) -> DurationUnit {
        match self {
            Granularity::Year => DurationUnit::Years,
            Granularity::Month => DurationUnit::Months,
            Granularity::Day => DurationUnit::Days,
            Granularity::Hour => DurationUnit::Hours,
            Granularity::Minute => DurationUnit::Minutes,
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Year => "year",
            Granularity::Month => "month",
            Granularity::Day => "day",
            Granularity::Hour => "hour",
            Granularity::Minute => "minute",
        })
    }
}

/// A proleptic Gregorian date whose fields are known down to some
/// granularity. Fields are filled prefix-wise: a day implies a month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CalendarDate {
    year: i32,
    month: Option<u8>,
    day: Option<u8>,
    hour: Option<u8>,
    minute: Option<u8>,
}

impl CalendarDate {
    pub fn new(
        year: i32,
        month: Option<u8>,
        day: Option<u8>,
        hour: Option<u8>,
        minute: Option<u8>,
    ) -> Result<Self, ValueError> {
        let d = CalendarDate {
            year,
            month,
            day,
            hour,
            minute,
        };
        let fields = [month.is_some(), day.is_some(), hour.is_some(), minute.is_some()];
        if fields.windows(2).any(|w| !w[0] && w[1]) {
            return Err(ValueError::InvalidDate(format!("{d:?} skips a field")));
        }
        if !(-9999..=9999).contains(&year) {
            return Err(ValueError::InvalidDate(format!("year {year} out of range")));
        }
        if let Some(m) = month {
            if !(1..=12).contains(&m) {
                return Err(ValueError::InvalidDate(format!("month {m}")));
            }
        }
        if let Some(day) = day {
            if NaiveDate::from_ymd_opt(year, month.unwrap_or(1) as u32, day as u32).is_none() {
                return Err(ValueError::InvalidDate(format!(
                    "{year}-{:02}-{day:02}",
                    month.unwrap_or(1)
                )));
            }
        }
        if hour.is_some_and(|h| h > 23) || minute.is_some_and(|m| m > 59) {
            return Err(ValueError::InvalidDate(format!("{d:?} has a bad time")));
        }
        Ok(d)
    }

    pub fn year(year: i32) -> Result<Self, ValueError> {
        Self::new(year, None, None, None, None)
    }

    pub fn ym(year: i32, month: u8) -> Result<Self, ValueError> {
        Self::new(year, Some(month), None, None, None)
    }

    pub fn ymd(year: i32, month: u8, day: u8) -> Result<Self, ValueError> {
        Self::new(year, Some(month), Some(day), None, None)
    }

    pub fn ymd_hm(year: i32, month: u8, day: u8, hour: u8, minute: u8) -> Result<Self, ValueError> {
        Self::new(year, Some(month), Some(day), Some(hour), Some(minute))
    }

    pub fn year_value(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> Option<u8> {
        self.month
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }

    pub fn hour(&self) -> Option<u8> {
        self.hour
    }

    pub fn minute(&self) -> Option<u8> {
        self.minute
    }

    pub fn granularity(&self) -> Granularity {
        match (self.month, self.day, self.hour, self.minute) {
            (None, ..) => Granularity::Year,
            (_, None, ..) => Granularity::Month,
            (_, _, None, _) => Granularity::Day,
            (_, _, _, None) => Granularity::Hour,
            _ => Granularity::Minute,
        }
    }

    /// Drops every field finer than `g`.
    pub fn truncate(&self, g: Granularity) -> CalendarDate {
        let keep = |level: Granularity, v: Option<u8>| if g >= level { v } else { None };
        CalendarDate {
            year: self.year,
            month: keep(Granularity::Month, self.month),
            day: keep(Granularity::Day, self.day),
            hour: keep(Granularity::Hour, self.hour),
            minute: keep(Granularity::Minute, self.minute),
        }
    }

    /// First instant covered by this date.
    pub fn begin(&self) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(
            self.year,
            self.month.unwrap_or(1) as u32,
            self.day.unwrap_or(1) as u32,
        )
        .expect("validated at construction")
        .and_hms_opt(self.hour.unwrap_or(0) as u32, self.minute.unwrap_or(0) as u32, 0)
        .expect("validated at construction")
    }

    /// First instant after this date.
    pub fn end(&self) -> NaiveDateTime {
        let b = self.begin();
        match self.granularity() {
            Granularity::Year => add_months(b.date(), 12).and_time(b.time()),
            Granularity::Month => add_months(b.date(), 1).and_time(b.time()),
            Granularity::Day => b + TimeDelta::days(1),
            Granularity::Hour => b + TimeDelta::hours(1),
            Granularity::Minute => b + TimeDelta::minutes(1),
        }
    }

    /// Covered span in minutes since the epoch, half open.
    pub fn span_minutes(&self) -> (i64, i64) {
        (minutes(self.begin()), minutes(self.end()))
    }

    fn from_naive(dt: NaiveDateTime, g: Granularity) -> CalendarDate {
        CalendarDate {
            year: dt.year(),
            month: Some(dt.month() as u8),
            day: Some(dt.day() as u8),
            hour: Some(dt.hour() as u8),
            minute: Some(dt.minute() as u8),
        }
        .truncate(g)
    }

    fn month_index(&self) -> i64 {
        self.year as i64 * 12 + self.month.unwrap_or(1) as i64 - 1
    }

    /// Day of week, Monday = 1. Only defined at day granularity or finer.
    pub fn weekday(&self) -> Option<u8> {
        self.day?;
        Some(self.begin().weekday().number_from_monday() as u8)
    }
}

fn minutes(dt: NaiveDateTime) -> i64 {
    dt.and_utc().timestamp().div_euclid(60)
}

fn add_months(d: NaiveDate, n: u32) -> NaiveDate {
    d.checked_add_months(chrono::Months::new(n)).expect("date in range")
}

fn days_in_month(year: i32, month: u8) -> u8 {
    let first = NaiveDate::from_ymd_opt(year, month as u32, 1).expect("valid month");
    (add_months(first, 1) - first).num_days() as u8
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
        }
        if let Some(d) = self.day {
            write!(f, "-{d:02}")?;
        }
        if let Some(h) = self.hour {
            write!(f, "T{h:02}")?;
            if let Some(m) = self.minute {
                write!(f, ":{m:02}")?;
            }
        }
        Ok(())
    }
}

fn num<T: FromStr>(s: &str, len: usize, whole: &str) -> Result<T, ValueError> {
    if s.len() != len || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ValueError::Parse(whole.to_string()));
    }
    s.parse().map_err(|_| ValueError::Parse(whole.to_string()))
}

impl FromStr for CalendarDate {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (date, time) = match s.split_once('T') {
            Some((d, t)) => (d, Some(t)),
            None => (s, None),
        };
        let mut parts = date.split('-');
        let year = num::<i32>(parts.next().unwrap_or(""), 4, s)?;
        let month = parts.next().map(|p| num::<u8>(p, 2, s)).transpose()?;
        let day = parts.next().map(|p| num::<u8>(p, 2, s)).transpose()?;
        if parts.next().is_some() {
            return Err(ValueError::Parse(s.to_string()));
        }
        let (hour, minute) = match time {
            None => (None, None),
            Some(_) if day.is_none() => return Err(ValueError::Parse(s.to_string())),
            Some(t) => match t.split_once(':') {
                Some((h, m)) => (Some(num::<u8>(h, 2, s)?), Some(num::<u8>(m, 2, s)?)),
                None => (Some(num::<u8>(t, 2, s)?), None),
            },
        };
        CalendarDate::new(year, month, day, hour, minute)
    }
}

impl Serialize for CalendarDate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarDate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DurationUnit {
    Years,
    Months,
    Days,
    Hours,
    Minutes,
}

impl DurationUnit {
    pub fn granularity(self) -> Granularity {
        match self {
            DurationUnit::Years => Granularity::Year,
            DurationUnit::Months => Granularity::Month,
            DurationUnit::Days => Granularity::Day,
            DurationUnit::Hours => Granularity::Hour,
            DurationUnit::Minutes => Granularity::Minute,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            DurationUnit::Years => "y",
            DurationUnit::Months => "M",
            DurationUnit::Days => "d",
            DurationUnit::Hours => "h",
            DurationUnit::Minutes => "m",
        }
    }

    fn from_letter(s: &str) -> Option<DurationUnit> {
        Some(match s {
            "y" | "Y" => DurationUnit::Years,
            "M" => DurationUnit::Months,
            "d" | "D" => DurationUnit::Days,
            "h" | "H" => DurationUnit::Hours,
            "m" => DurationUnit::Minutes,
            _ => return None,
        })
    }

    fn calendar_family(self) -> bool {
        matches!(self, DurationUnit::Years | DurationUnit::Months)
    }
}

impl fmt::Display for DurationUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.granularity(), f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Duration {
    pub amount: u32,
    pub unit: DurationUnit,
}

impl Duration {
    pub fn new(amount: u32, unit: DurationUnit) -> Self {
        Duration { amount, unit }
    }

    pub fn years(n: u32) -> Self {
        Self::new(n, DurationUnit::Years)
    }

    pub fn months(n: u32) -> Self {
        Self::new(n, DurationUnit::Months)
    }

    pub fn days(n: u32) -> Self {
        Self::new(n, DurationUnit::Days)
    }

    pub fn hours(n: u32) -> Self {
        Self::new(n, DurationUnit::Hours)
    }

    pub fn minutes(n: u32) -> Self {
        Self::new(n, DurationUnit::Minutes)
    }

    /// Exact amount in `unit` when both units belong to the same family
    /// (years/months or days/hours/minutes), rounding down when coarsening.
    pub fn exact_in(&self, unit: DurationUnit) -> Option<u64> {
        if self.unit.calendar_family() != unit.calendar_family() {
            return None;
        }
        Some(self.amount as u64 * unit_scale(self.unit) / unit_scale(unit))
    }

    /// Length in minutes, counting a year as 365 days and a month as 30.
    pub fn approx_minutes(&self) -> u64 {
        let per = match self.unit {
            DurationUnit::Years => 365 * 1440,
            DurationUnit::Months => 30 * 1440,
            DurationUnit::Days => 1440,
            DurationUnit::Hours => 60,
            DurationUnit::Minutes => 1,
        };
        self.amount as u64 * per
    }
}

// Within-family scale: months for the calendar family, minutes otherwise.
fn unit_scale(u: DurationUnit) -> u64 {
    match u {
        DurationUnit::Years => 12,
        DurationUnit::Months => 1,
        DurationUnit::Days => 1440,
        DurationUnit::Hours => 60,
        DurationUnit::Minutes => 1,
    }
}

/// `tol` expressed in `unit`, rounded down. Crossing families goes
/// through the approximate day count.
fn tolerance_in(tol: &Duration, unit: DurationUnit) -> u64 {
    if tol.amount == 0 {
        return 0;
    }
    tol.exact_in(unit).unwrap_or_else(|| {
        let per = Duration::new(1, unit).approx_minutes();
        tol.approx_minutes() / per
    })
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.amount, self.unit.letter())
    }
}

impl FromStr for Duration {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s
            .find(|c: char| !c.is_ascii_digit())
            .ok_or_else(|| ValueError::Parse(s.to_string()))?;
        let (n, u) = s.split_at(split);
        if n.is_empty() {
            return Err(ValueError::Parse(s.to_string()));
        }
        let unit = DurationUnit::from_letter(u).ok_or_else(|| ValueError::Parse(s.to_string()))?;
        let amount = n.parse().map_err(|_| ValueError::Parse(s.to_string()))?;
        Ok(Duration { amount, unit })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateInterval {
    start: CalendarDate,
    end: CalendarDate,
}

impl DateInterval {
    pub fn new(start: CalendarDate, end: CalendarDate) -> Result<Self, ValueError> {
        let g = start.granularity().coarsest(end.granularity());
        if start.truncate(g).begin() > end.truncate(g).begin() {
            return Err(ValueError::InvalidDate(format!("interval {start}/{end} is reversed")));
        }
        Ok(DateInterval { start, end })
    }

    pub fn start(&self) -> CalendarDate {
        self.start
    }

    pub fn end(&self) -> CalendarDate {
        self.end
    }

    /// From the first instant of `start` to the last instant of `end`.
    pub fn span_minutes(&self) -> (i64, i64) {
        (self.start.span_minutes().0, self.end.span_minutes().1)
    }
}

impl fmt::Display for DateInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeOfDay {
    hour: u8,
    minute: u8,
}

impl TimeOfDay {
    pub fn new(hour: u8, minute: u8) -> Result<Self, ValueError> {
        if hour > 23 || minute > 59 {
            return Err(ValueError::InvalidDate(format!("T{hour:02}:{minute:02}")));
        }
        Ok(TimeOfDay { hour, minute })
    }

    pub fn hour(&self) -> u8 {
        self.hour
    }

    pub fn minute(&self) -> u8 {
        self.minute
    }

    pub fn minute_of_day(&self) -> u32 {
        self.hour as u32 * 60 + self.minute as u32
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{:02}:{:02}", self.hour, self.minute)
    }
}

/// Codes for adverbials that carry no absolute calendar value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodedAdverbial {
    /// Day of week, Monday = 1.
    Weekday(u8),
    /// An offset from a reference point, e.g. two days ago.
    Relative { offset: i32, unit: DurationUnit },
    Often,
    /// Some time, a positive but unspecified duration.
    Psd,
    /// Many days.
    Pmd,
    Morning,
    Night,
    Afternoon,
}

impl CodedAdverbial {
    pub fn weekday(d: u8) -> Result<Self, ValueError> {
        if (1..=7).contains(&d) {
            Ok(CodedAdverbial::Weekday(d))
        } else {
            Err(ValueError::Parse(format!("W{d}")))
        }
    }

    pub fn relative_days(offset: i32) -> Self {
        CodedAdverbial::Relative {
            offset,
            unit: DurationUnit::Days,
        }
    }

    /// Minute-of-day range `[lo, hi)` for the parts of the day.
    pub fn day_part(&self) -> Option<(u32, u32)> {
        match self {
            CodedAdverbial::Morning => Some((0, 12 * 60)),
            CodedAdverbial::Afternoon => Some((12 * 60, 18 * 60)),
            CodedAdverbial::Night => Some((18 * 60, 24 * 60)),
            _ => None,
        }
    }
}

impl fmt::Display for CodedAdverbial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodedAdverbial::Weekday(d) => write!(f, "W{d}"),
            CodedAdverbial::Relative { offset, unit } => {
                write!(f, "R{offset:+}")?;
                if *unit != DurationUnit::Days {
                    f.write_str(unit.letter())?;
                }
                Ok(())
            }
            CodedAdverbial::Often => f.write_str("OFTEN"),
            CodedAdverbial::Psd => f.write_str("PSD"),
            CodedAdverbial::Pmd => f.write_str("PMD"),
            CodedAdverbial::Morning => f.write_str("aMORNING"),
            CodedAdverbial::Night => f.write_str("aNIGHT"),
            CodedAdverbial::Afternoon => f.write_str("AFTERNOON"),
        }
    }
}

impl FromStr for CodedAdverbial {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ValueError::Parse(s.to_string());
        Ok(match s {
            "OFTEN" => CodedAdverbial::Often,
            "PSD" => CodedAdverbial::Psd,
            "PMD" => CodedAdverbial::Pmd,
            "aMORNING" => CodedAdverbial::Morning,
            "aNIGHT" => CodedAdverbial::Night,
            "AFTERNOON" => CodedAdverbial::Afternoon,
            _ if s.starts_with('W') && s.len() == 2 => {
                CodedAdverbial::weekday(s[1..].parse().map_err(|_| bad())?)?
            }
            _ if s.starts_with('R') && s.len() > 1 => {
                let body = &s[1..];
                let (n, unit) = match body.char_indices().last() {
                    Some((i, c)) if c.is_ascii_alphabetic() => {
                        (&body[..i], DurationUnit::from_letter(&body[i..]).ok_or_else(bad)?)
                    }
                    _ => (body, DurationUnit::Days),
                };
                let offset = n.parse().map_err(|_| bad())?;
                CodedAdverbial::Relative { offset, unit }
            }
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalValue {
    Date(CalendarDate),
    Duration(Duration),
    Interval(DateInterval),
    Code(CodedAdverbial),
    Time(TimeOfDay),
}

/// How a value can anchor an event: at a point in time, for a length of
/// time, or across a stretch of time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemporalKind {
    Date,
    Duration,
    Interval,
}

impl TemporalValue {
    pub fn kind(&self) -> TemporalKind {
        use CodedAdverbial as C;
        match self {
            TemporalValue::Date(_) | TemporalValue::Time(_) => TemporalKind::Date,
            TemporalValue::Code(C::Weekday(_) | C::Relative { .. } | C::Often) => TemporalKind::Date,
            TemporalValue::Duration(_) | TemporalValue::Code(C::Psd | C::Pmd) => {
                TemporalKind::Duration
            }
            TemporalValue::Interval(_)
            | TemporalValue::Code(C::Morning | C::Night | C::Afternoon) => TemporalKind::Interval,
        }
    }

    /// Absolute span in minutes, for values tied to the calendar.
    pub fn span_minutes(&self) -> Option<(i64, i64)> {
        match self {
            TemporalValue::Date(d) => Some(d.span_minutes()),
            TemporalValue::Interval(i) => Some(i.span_minutes()),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<&CalendarDate> {
        match self {
            TemporalValue::Date(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_duration(&self) -> Option<&Duration> {
        match self {
            TemporalValue::Duration(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for TemporalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalValue::Date(d) => d.fmt(f),
            TemporalValue::Duration(d) => d.fmt(f),
            TemporalValue::Interval(i) => i.fmt(f),
            TemporalValue::Code(c) => c.fmt(f),
            TemporalValue::Time(t) => t.fmt(f),
        }
    }
}

impl FromStr for TemporalValue {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let first = s.chars().next().ok_or_else(|| ValueError::Parse(s.to_string()))?;
        if let Some((a, b)) = s.split_once('/') {
            return Ok(TemporalValue::Interval(DateInterval::new(a.parse()?, b.parse()?)?));
        }
        if let Some(t) = s.strip_prefix('T') {
            let (h, m) = t.split_once(':').ok_or_else(|| ValueError::Parse(s.to_string()))?;
            return Ok(TemporalValue::Time(TimeOfDay::new(
                num(h, 2, s)?,
                num(m, 2, s)?,
            )?));
        }
        if first.is_ascii_digit() {
            let is_duration = s.ends_with(|c: char| c.is_ascii_alphabetic()) && !s.contains('-');
            return if is_duration {
                s.parse().map(TemporalValue::Duration)
            } else {
                s.parse().map(TemporalValue::Date)
            };
        }
        s.parse().map(TemporalValue::Code)
    }
}

impl From<CalendarDate> for TemporalValue {
    fn from(d: CalendarDate) -> Self {
        TemporalValue::Date(d)
    }
}

impl From<Duration> for TemporalValue {
    fn from(d: Duration) -> Self {
        TemporalValue::Duration(d)
    }
}

impl From<DateInterval> for TemporalValue {
    fn from(i: DateInterval) -> Self {
        TemporalValue::Interval(i)
    }
}

impl From<CodedAdverbial> for TemporalValue {
    fn from(c: CodedAdverbial) -> Self {
        TemporalValue::Code(c)
    }
}

impl From<TimeOfDay> for TemporalValue {
    fn from(t: TimeOfDay) -> Self {
        TemporalValue::Time(t)
    }
}

fn shift(t: &CalendarDate, d: &Duration, sign: i64) -> Result<CalendarDate, ValueError> {
    let g = t.granularity();
    if d.unit.granularity() > g {
        return Err(ValueError::Precision {
            unit: d.unit,
            granularity: g,
        });
    }
    let n = d.amount as i64 * sign;
    match d.unit {
        DurationUnit::Years | DurationUnit::Months => {
            let months = if d.unit == DurationUnit::Years { n * 12 } else { n };
            let idx = t.month_index() + months;
            let year = i32::try_from(idx.div_euclid(12)).map_err(|_| ValueError::Overflow)?;
            if !(-9999..=9999).contains(&year) {
                return Err(ValueError::Overflow);
            }
            let month = (idx.rem_euclid(12) + 1) as u8;
            let month_field = t.month.map(|_| month);
            let day = t.day.map(|day| day.min(days_in_month(year, month)));
            CalendarDate::new(year, month_field, day, t.hour, t.minute)
        }
        DurationUnit::Days | DurationUnit::Hours | DurationUnit::Minutes => {
            let delta = match d.unit {
                DurationUnit::Days => TimeDelta::try_days(n),
                DurationUnit::Hours => TimeDelta::try_hours(n),
                _ => TimeDelta::try_minutes(n),
            }
            .ok_or(ValueError::Overflow)?;
            let moved = t.begin().checked_add_signed(delta).ok_or(ValueError::Overflow)?;
            Ok(CalendarDate::from_naive(moved, g))
        }
    }
}

/// Date plus duration. Overflowing day-of-month clamps to the month end.
pub fn somme(t: &CalendarDate, d: &Duration) -> Result<CalendarDate, ValueError> {
    shift(t, d, 1)
}

/// Date minus duration, with the same clamping as [`somme`].
pub fn retranche(t: &CalendarDate, d: &Duration) -> Result<CalendarDate, ValueError> {
    shift(t, d, -1)
}

/// Distance between two dates in the unit of their coarsest common
/// granularity.
pub fn difference(t1: &CalendarDate, t2: &CalendarDate) -> Duration {
    let g = t1.granularity().coarsest(t2.granularity());
    let (a, b) = (t1.truncate(g), t2.truncate(g));
    let amount = match g {
        Granularity::Year => (a.year as i64 - b.year as i64).abs(),
        Granularity::Month => (a.month_index() - b.month_index()).abs(),
        Granularity::Day => (a.begin() - b.begin()).num_days().abs(),
        Granularity::Hour => (a.begin() - b.begin()).num_hours().abs(),
        Granularity::Minute => (a.begin() - b.begin()).num_minutes().abs(),
    };
    Duration::new(amount as u32, g.unit())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` and `{1}` cannot be compared")]
pub struct Incomparable(pub String, pub String);

fn incomparable(a: &TemporalValue, b: &TemporalValue) -> Incomparable {
    Incomparable(a.to_string(), b.to_string())
}

/// Thresholds for the vague duration codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VagueThresholds {
    /// "Many days" means strictly more than this many days.
    pub many_days: u32,
}

impl Default for VagueThresholds {
    fn default() -> Self {
        VagueThresholds { many_days: 2 }
    }
}

/// Inclusion with a reason when the two values do not compare.
pub fn inclusion(
    inner: &TemporalValue,
    outer: &TemporalValue,
    th: &VagueThresholds,
) -> Result<bool, Incomparable> {
    use TemporalValue as V;
    if let (Some((a0, a1)), Some((b0, b1))) = (inner.span_minutes(), outer.span_minutes()) {
        return Ok(b0 <= a0 && a1 <= b1);
    }
    match (inner, outer) {
        (V::Time(t), V::Code(c)) if c.day_part().is_some() => {
            let (lo, hi) = c.day_part().unwrap_or_default();
            Ok((lo..hi).contains(&t.minute_of_day()))
        }
        (V::Date(d), V::Code(c)) if c.day_part().is_some() && d.hour.is_some() => {
            let (lo, hi) = c.day_part().unwrap_or_default();
            let start = d.hour.unwrap_or(0) as u32 * 60 + d.minute.unwrap_or(0) as u32;
            let end = start + if d.minute.is_some() { 1 } else { 60 };
            Ok(lo <= start && end <= hi)
        }
        (V::Date(d), V::Code(CodedAdverbial::Weekday(w))) if d.day.is_some() => {
            Ok(d.weekday() == Some(*w))
        }
        (V::Time(a), V::Time(b)) => Ok(a == b),
        (V::Code(a), V::Code(b)) => Ok(a == b),
        (V::Duration(d), V::Code(c @ (CodedAdverbial::Psd | CodedAdverbial::Pmd))) => {
            Ok(vague_match_with(d, c, th))
        }
        (V::Duration(a), V::Duration(b)) => {
            let unit = a.unit.max(b.unit);
            match (a.exact_in(unit), b.exact_in(unit)) {
                (Some(x), Some(y)) => Ok(x == y),
                _ => Err(incomparable(inner, outer)),
            }
        }
        _ => Err(incomparable(inner, outer)),
    }
}

/// Whether `inner` lies within `outer`. Values that cannot be compared are
/// not included.
pub fn inclut(inner: &TemporalValue, outer: &TemporalValue) -> bool {
    inclusion(inner, outer, &VagueThresholds::default()).unwrap_or(false)
}

fn dates_equal(a: &CalendarDate, b: &CalendarDate, tol: &Duration) -> bool {
    let g = a
        .granularity()
        .coarsest(b.granularity())
        .coarsest(tol.unit.granularity());
    let gap = difference(&a.truncate(g), &b.truncate(g));
    gap.amount as u64 <= tolerance_in(tol, gap.unit)
}

/// Equality up to `tol`, with a reason when the values do not compare.
pub fn equality(
    t1: &TemporalValue,
    t2: &TemporalValue,
    tol: &Duration,
) -> Result<bool, Incomparable> {
    use TemporalValue as V;
    match (t1, t2) {
        (V::Date(a), V::Date(b)) => Ok(dates_equal(a, b, tol)),
        (V::Interval(a), V::Interval(b)) => {
            Ok(dates_equal(&a.start, &b.start, tol) && dates_equal(&a.end, &b.end, tol))
        }
        (V::Time(a), V::Time(b)) => {
            let gap = (a.minute_of_day() as i64 - b.minute_of_day() as i64).unsigned_abs();
            Ok(gap <= tolerance_in(tol, DurationUnit::Minutes))
        }
        (V::Code(a), V::Code(b)) => Ok(a == b),
        (V::Duration(a), V::Duration(b)) => {
            let unit = a.unit.max(b.unit);
            match (a.exact_in(unit), b.exact_in(unit)) {
                (Some(x), Some(y)) => Ok(x.abs_diff(y) <= tolerance_in(tol, unit)),
                _ => Err(incomparable(t1, t2)),
            }
        }
        _ => Err(incomparable(t1, t2)),
    }
}

/// Equality after aligning both values to their coarsest common
/// granularity, allowing a gap of up to `tol`.
pub fn egale(t1: &TemporalValue, t2: &TemporalValue, tol: &Duration) -> bool {
    equality(t1, t2, tol).unwrap_or(false)
}

/// Default tolerance: one year at year granularity, none otherwise.
pub fn default_tolerance(g: Granularity) -> Duration {
    match g {
        Granularity::Year => Duration::years(1),
        other => Duration::new(0, other.unit()),
    }
}

/// Moves a weekday by `offset` days, wrapping around the week.
pub fn weekday_shift(day: u8, offset: i32) -> u8 {
    ((day as i32 - 1 + offset).rem_euclid(7) + 1) as u8
}

pub fn vague_match_with(d: &Duration, code: &CodedAdverbial, th: &VagueThresholds) -> bool {
    match code {
        CodedAdverbial::Psd => d.amount > 0,
        CodedAdverbial::Pmd => d.approx_minutes() > th.many_days as u64 * 1440,
        _ => false,
    }
}

/// Whether a concrete duration fits a vague duration code.
pub fn vague_match(d: &Duration, code: &CodedAdverbial) -> bool {
    vague_match_with(d, code, &VagueThresholds::default())
}

/// Turns a relative code into a calendar date, counted from `reference`
/// and kept at the granularity of the offset's unit.
pub fn resolve_relative(
    code: &CodedAdverbial,
    reference: Option<&CalendarDate>,
) -> Result<TemporalValue, ValueError> {
    let CodedAdverbial::Relative { offset, unit } = *code else {
        return Ok(TemporalValue::Code(*code));
    };
    let reference = reference.ok_or(ValueError::MissingReference)?;
    let d = Duration::new(offset.unsigned_abs(), unit);
    let moved = if offset < 0 {
        retranche(reference, &d)?
    } else {
        somme(reference, &d)?
    };
    Ok(TemporalValue::Date(moved.truncate(unit.granularity())))
}

/// Resolves a relative code against an anchor value: a weekday anchor is
/// shifted around the week, a date anchor goes through [`resolve_relative`].
pub fn resolve_against(
    code: &CodedAdverbial,
    anchor: &TemporalValue,
) -> Result<TemporalValue, ValueError> {
    match (code, anchor) {
        (
            CodedAdverbial::Relative {
                offset,
                unit: DurationUnit::Days,
            },
            TemporalValue::Code(CodedAdverbial::Weekday(w)),
        ) => Ok(TemporalValue::Code(CodedAdverbial::Weekday(weekday_shift(*w, *offset)))),
        (_, TemporalValue::Date(d)) => resolve_relative(code, Some(d)),
        _ => Err(ValueError::MissingReference),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimePoint {
    Event,
    Reference,
    Speech,
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimePoint::Event => "E",
            TimePoint::Reference => "R",
            TimePoint::Speech => "S",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tense {
    Present,
    SimplePast,
    Pluperfect,
    Future,
    FutureAnterior,
}

impl FromStr for Tense {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "present" => Tense::Present,
            "simple-past" | "past" => Tense::SimplePast,
            "pluperfect" => Tense::Pluperfect,
            "future" => Tense::Future,
            "future-anterior" | "future-perfect" => Tense::FutureAnterior,
            _ => return Err(ValueError::UnsupportedTense(s.to_string())),
        })
    }
}

impl Tense {
    /// Maps a tense/aspect pair as found on event instances.
    pub fn from_annotation(tense: &str, aspect: &str) -> Result<Tense, ValueError> {
        let perfective = aspect.eq_ignore_ascii_case("PERFECTIVE");
        match (tense.to_ascii_uppercase().as_str(), perfective) {
            ("PRESENT", false) => Ok(Tense::Present),
            ("PAST", false) => Ok(Tense::SimplePast),
            ("PAST", true) => Ok(Tense::Pluperfect),
            ("FUTURE", false) => Ok(Tense::Future),
            ("FUTURE", true) => Ok(Tense::FutureAnterior),
            _ => Err(ValueError::UnsupportedTense(format!("{tense}/{aspect}"))),
        }
    }
}

/// Event, reference and speech points in temporal order; points sharing a
/// group are simultaneous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointOrder(pub Vec<Vec<TimePoint>>);

impl fmt::Display for PointOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = self
            .0
            .iter()
            .map(|g| g.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&groups.join("_"))
    }
}

pub fn reichenbach_config(tense: Tense) -> PointOrder {
    use TimePoint::{Event as E, Reference as R, Speech as S};
    PointOrder(match tense {
        Tense::Present => vec![vec![E, R, S]],
        Tense::SimplePast => vec![vec![E, R], vec![S]],
        Tense::Pluperfect => vec![vec![E], vec![R], vec![S]],
        Tense::Future => vec![vec![S], vec![E, R]],
        Tense::FutureAnterior => vec![vec![S], vec![E], vec![R]],
    })
}
