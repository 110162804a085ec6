//! Naive local calendar timestamps at hourly resolution.
//!
//! All joins in the pipeline are by exact date-hour equality, so there is
//! no timezone handling and no DST arithmetic. The wire format is
//! `YYYY-MM-DD` for dates and `YYYY-MM-DDTHH` for date-hours.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTimeError {
    pub input: String,
    pub reason: &'static str,
}

impl fmt::Display for ParseTimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid timestamp `{}`: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseTimeError {}

fn err(input: &str, reason: &'static str) -> ParseTimeError {
    ParseTimeError { input: input.to_string(), reason }
}

/// A calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self, ParseTimeError> {
        if !(1..=12).contains(&month) {
            return Err(ParseTimeError {
                input: format!("{year:04}-{month:02}-{day:02}"),
                reason: "month out of range",
            });
        }
        if day == 0 || day > days_in_month(year, month) {
            return Err(ParseTimeError {
                input: format!("{year:04}-{month:02}-{day:02}"),
                reason: "day out of range for that month",
            });
        }
        Ok(Date { year, month, day })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    pub fn day(&self) -> u8 {
        self.day
    }

    /// The next calendar day.
    pub fn succ(self) -> Date {
        if self.day < days_in_month(self.year, self.month) {
            Date { day: self.day + 1, ..self }
        } else if self.month < 12 {
            Date { year: self.year, month: self.month + 1, day: 1 }
        } else {
            Date { year: self.year + 1, month: 1, day: 1 }
        }
    }

    pub fn at_hour(self, hour: u8) -> Result<DateHour, ParseTimeError> {
        if hour > 23 {
            return Err(ParseTimeError { input: format!("{self}T{hour:02}"), reason: "hour out of range" });
        }
        Ok(DateHour { date: self, hour })
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl FromStr for Date {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return Err(err(s, "expected YYYY-MM-DD"));
        }
        let year: i32 = s[0..4].parse().map_err(|_| err(s, "bad year"))?;
        let month: u8 = s[5..7].parse().map_err(|_| err(s, "bad month"))?;
        let day: u8 = s[8..10].parse().map_err(|_| err(s, "bad day"))?;
        Date::new(year, month, day).map_err(|e| ParseTimeError { input: s.to_string(), ..e })
    }
}

impl Serialize for Date {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Date {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// A calendar date plus an hour of day (0–23).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DateHour {
    pub date: Date,
    pub hour: u8,
}

impl fmt::Display for DateHour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}T{:02}", self.date, self.hour)
    }
}

impl FromStr for DateHour {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 13 || bytes[10] != b'T' {
            return Err(err(s, "expected YYYY-MM-DDTHH"));
        }
        let date: Date = s[0..10].parse().map_err(|e: ParseTimeError| ParseTimeError {
            input: s.to_string(),
            reason: e.reason,
        })?;
        let hour: u8 = s[11..13].parse().map_err(|_| err(s, "bad hour"))?;
        if hour > 23 {
            return Err(err(s, "hour out of range"));
        }
        Ok(DateHour { date, hour })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let dh: DateHour = "2016-07-01T13".parse().unwrap();
        assert_eq!(dh.date, Date::new(2016, 7, 1).unwrap());
        assert_eq!(dh.hour, 13);
        assert_eq!(dh.to_string(), "2016-07-01T13");
    }

    #[test]
    fn rejects_malformed_timestamps() {
        assert!("2016-07-01".parse::<DateHour>().is_err());
        assert!("2016-07-01T24".parse::<DateHour>().is_err());
        assert!("2016-13-01T05".parse::<DateHour>().is_err());
        assert!("2016-02-30T05".parse::<DateHour>().is_err());
        assert!("2016-07-01 13".parse::<DateHour>().is_err());
    }

    #[test]
    fn leap_year_rules() {
        assert!(Date::new(2016, 2, 29).is_ok());
        assert!(Date::new(2017, 2, 29).is_err());
        assert!(Date::new(2000, 2, 29).is_ok());
        assert!(Date::new(1900, 2, 29).is_err());
    }

    #[test]
    fn succ_rolls_over_months_and_years() {
        let d = Date::new(2016, 5, 31).unwrap();
        assert_eq!(d.succ(), Date::new(2016, 6, 1).unwrap());
        let y = Date::new(2016, 12, 31).unwrap();
        assert_eq!(y.succ(), Date::new(2017, 1, 1).unwrap());
        let f = Date::new(2016, 2, 28).unwrap();
        assert_eq!(f.succ(), Date::new(2016, 2, 29).unwrap());
    }

    #[test]
    fn ordering_is_chronological() {
        let a: DateHour = "2016-05-31T23".parse().unwrap();
        let b: DateHour = "2016-06-01T00".parse().unwrap();
        assert!(a < b);
    }
}
