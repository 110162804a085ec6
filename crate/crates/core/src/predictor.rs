//! The four candidate weather predictors and subsets of them.
//!
//! Sky cover (S), dew point (D), relative humidity (R), and temperature (T)
//! are the candidate inputs of every forecasting model in this crate.
//! Subsets are labelled by their symbols in S, D, R, T order, e.g. `"DRT"`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the four candidate predictors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    SkyCover,
    DewPoint,
    RelHumidity,
    Temperature,
}

impl Predictor {
    pub const ALL: [Predictor; 4] = [
        Predictor::SkyCover,
        Predictor::DewPoint,
        Predictor::RelHumidity,
        Predictor::Temperature,
    ];

    pub fn symbol(self) -> char {
        match self {
            Predictor::SkyCover => 'S',
            Predictor::DewPoint => 'D',
            Predictor::RelHumidity => 'R',
            Predictor::Temperature => 'T',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'S' => Ok(Predictor::SkyCover),
            'D' => Ok(Predictor::DewPoint),
            'R' => Ok(Predictor::RelHumidity),
            'T' => Ok(Predictor::Temperature),
            other => Err(Error::UnknownPredictor { symbol: other }),
        }
    }

    fn bit(self) -> u8 {
        match self {
            Predictor::SkyCover => 1,
            Predictor::DewPoint => 2,
            Predictor::RelHumidity => 4,
            Predictor::Temperature => 8,
        }
    }
}

/// Values of the four predictors at one timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predictors {
    pub sky_cover: f64,
    pub dew_point: f64,
    pub rel_humidity: f64,
    pub temperature: f64,
}

impl Predictors {
    pub fn get(&self, p: Predictor) -> f64 {
        match p {
            Predictor::SkyCover => self.sky_cover,
            Predictor::DewPoint => self.dew_point,
            Predictor::RelHumidity => self.rel_humidity,
            Predictor::Temperature => self.temperature,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.sky_cover, self.dew_point, self.rel_humidity, self.temperature]
    }

    /// The values of the predictors in `set`, in S, D, R, T order.
    pub fn select(&self, set: PredictorSet) -> Vec<f64> {
        set.members().map(|p| self.get(p)).collect()
    }
}

/// A subset of the four predictors, stored as a 4-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredictorSet(u8);

impl PredictorSet {
    pub const EMPTY: PredictorSet = PredictorSet(0);
    /// All four predictors: SDRT.
    pub const FULL: PredictorSet = PredictorSet(0b1111);

    pub fn with(self, p: Predictor) -> Self {
        PredictorSet(self.0 | p.bit())
    }

    pub fn contains(self, p: Predictor) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: PredictorSet) -> bool {
        self.0 & other.0 == self.0
    }

    /// Members in S, D, R, T order.
    pub fn members(self) -> impl Iterator<Item = Predictor> {
        Predictor::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    /// Label such as `"SDRT"` or `"DR"`.
    pub fn label(self) -> String {
        self.members().map(Predictor::symbol).collect()
    }

    /// Parse a label like `"sdrt"` or `"DR"`; must be nonempty and name
    /// each predictor at most once.
    pub fn parse(s: &str) -> Result<Self> {
        let mut set = PredictorSet::EMPTY;
        for c in s.trim().chars() {
            let p = Predictor::from_symbol(c)?;
            set = set.with(p);
        }
        if set.is_empty() {
            return Err(Error::EmptyPredictorSet);
        }
        Ok(set)
    }

    /// The 15 nonempty subsets of {S, D, R, T}, in mask order.
    pub fn non_empty_subsets() -> impl Iterator<Item = PredictorSet> {
        (1u8..=0b1111).map(PredictorSet)
    }
}

impl fmt::Display for PredictorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.members() {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

// Serialize subsets as their label so reports read "SDRT" rather than a mask.
impl Serialize for PredictorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PredictorSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PredictorSet::parse(&s).map_err(D::Error::custom)
    }
}
