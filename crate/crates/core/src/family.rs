//! The three surgery families handled by the library.

use crate::error::{Result, TorsionError};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// p/1 surgery on the figure-eight knot.
    #[serde(rename = "FigureEight-p/1")]
    FigureEightP,
    /// 1/q surgery on the figure-eight knot.
    #[serde(rename = "FigureEight-1/q")]
    FigureEightQ,
    /// 1/q surgery on the 5_2 knot.
    #[serde(rename = "FiveTwo-1/q")]
    FiveTwoQ,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FigureEightP => "FigureEight-p/1",
            Family::FigureEightQ => "FigureEight-1/q",
            Family::FiveTwoQ => "FiveTwo-1/q",
        }
    }

    pub fn knot(self) -> &'static str {
        match self {
            Family::FigureEightP | Family::FigureEightQ => "4_1",
            Family::FiveTwoQ => "5_2",
        }
    }

    /// Number of generators (and relators) of the presentation.
    pub fn generator_count(self) -> usize {
        match self {
            Family::FigureEightP => 3,
            Family::FigureEightQ | Family::FiveTwoQ => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = TorsionError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FigureEight-p/1" => Ok(Family::FigureEightP),
            "FigureEight-1/q" => Ok(Family::FigureEightQ),
            "FiveTwo-1/q" => Ok(Family::FiveTwoQ),
            _ => Err(TorsionError::UnsupportedFamily(s.to_string())),
        }
    }
}

/// A closed manifold: family plus its integer parameter (p or q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Manifold {
    pub family: Family,
    pub parameter: i64,
}

impl Manifold {
    pub fn new(family: Family, parameter: i64) -> Result<Self> {
        let m = Manifold { family, parameter };
        m.validate()?;
        Ok(m)
    }

    pub fn fig8_p(p: i64) -> Self {
        Manifold { family: Family::FigureEightP, parameter: p }
    }

    pub fn fig8_q(q: i64) -> Self {
        Manifold { family: Family::FigureEightQ, parameter: q }
    }

    pub fn five_two_q(q: i64) -> Self {
        Manifold { family: Family::FiveTwoQ, parameter: q }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family != Family::FigureEightP && self.parameter == 0 {
            return Err(TorsionError::UnsupportedFamily(format!(
                "{} needs q ≠ 0",
                self.family
            )));
        }
        if self.parameter.abs() > 64 {
            return Err(TorsionError::UnsupportedFamily(format!(
                "parameter {} outside the supported range |n| ≤ 64",
                self.parameter
            )));
        }
        Ok(())
    }

    /// Hyperbolic regime in which the vanishing identity is asserted.
    pub fn is_hyperbolic(&self) -> bool {
        match self.family {
            Family::FigureEightP => self.parameter.abs() >= 5,
            Family::FigureEightQ => self.parameter.abs() >= 2,
            // The exceptional slopes of 5_2 in this chirality are 0, 1, 2, 3, 4.
            Family::FiveTwoQ => self.parameter != 0 && self.parameter != 1,
        }
    }

    /// Parse a knot name (`41`, `52`) and surgery coefficient `p/q`.
    pub fn from_surgery(knot: &str, surgery: &str) -> Result<Self> {
        let (num, den) = surgery
            .split_once('/')
            .ok_or_else(|| TorsionError::Parse(format!("surgery coefficient {surgery:?} is not p/q")))?;
        let num: i64 = num.trim().parse().map_err(|_| TorsionError::Parse(surgery.into()))?;
        let den: i64 = den.trim().parse().map_err(|_| TorsionError::Parse(surgery.into()))?;
        let scope = || {
            TorsionError::UnsupportedFamily(format!(
                "surgery {surgery} on {knot}: only p/1 and 1/q on 4_1 and 1/q on 5_2 are implemented"
            ))
        };
        let m = match knot.trim_start_matches('K') {
            "41" | "4_1" => {
                if den == 1 {
                    Manifold::fig8_p(num)
                } else if num.abs() == 1 && den != 0 {
                    Manifold::fig8_q(num * den)
                } else if den == -1 {
                    Manifold::fig8_p(-num)
                } else {
                    return Err(scope());
                }
            }
            "52" | "5_2" => {
                if num.abs() == 1 && den != 0 {
                    Manifold::five_two_q(num * den)
                } else {
                    return Err(scope());
                }
            }
            _ => return Err(TorsionError::UnsupportedFamily(format!("knot {knot}"))),
        };
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::FigureEightP => write!(f, "S^3_{{{}/1}}(4_1)", self.parameter),
            Family::FigureEightQ => write!(f, "S^3_{{1/{}}}(4_1)", self.parameter),
            Family::FiveTwoQ => write!(f, "S^3_{{1/{}}}(5_2)", self.parameter),
        }
    }
}
