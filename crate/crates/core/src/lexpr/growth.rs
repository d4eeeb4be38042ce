use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::eval::eval_interval;
use super::expr::{div, pow, rat, Expr};
use super::function::LEFunction;
use crate::arith::Interval;
use crate::error::{Error, Result};

/// Declared growth regime of `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GrowthClass {
    /// `x^(d-1) < f(x) < x^d` strictly in the growth order.
    SuperLinearStrict { d: u32 },
    /// `f(x) ~ alpha x^(d-1)`.
    ExactPolynomial { d: u32, alpha_hint: Option<f64> },
    /// `x < f(x) < x^2`.
    NearLinear,
    /// `x^eps < f(x) < x`.
    SubLinear { epsilon: BigRational },
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthClass::SuperLinearStrict { d } => write!(f, "super:{d}"),
            GrowthClass::ExactPolynomial { d, alpha_hint: None } => write!(f, "exact:{d}"),
            GrowthClass::ExactPolynomial { d, alpha_hint: Some(a) } => write!(f, "exact:{d}:{a}"),
            GrowthClass::NearLinear => write!(f, "near"),
            GrowthClass::SubLinear { epsilon } => write!(f, "sub:{epsilon}"),
        }
    }
}

impl FromStr for GrowthClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<GrowthClass> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidArgument(format!("unknown growth class '{s}'"));
        let degree = |t: &str| -> Result<u32> {
            let d: u32 = t.parse().map_err(|_| bad())?;
            if d < 3 {
                return Err(Error::InvalidArgument(format!("degree d must be at least 3, got {d}")));
            }
            Ok(d)
        };
        match parts.as_slice() {
            ["super", d] => Ok(GrowthClass::SuperLinearStrict { d: degree(d)? }),
            ["exact", d] => Ok(GrowthClass::ExactPolynomial { d: degree(d)?, alpha_hint: None }),
            ["exact", d, a] => Ok(GrowthClass::ExactPolynomial {
                d: degree(d)?,
                alpha_hint: Some(a.parse().map_err(|_| bad())?),
            }),
            ["near"] => Ok(GrowthClass::NearLinear),
            ["sub", e] => {
                let eps: BigRational = e.parse().map_err(|_| bad())?;
                if !eps.is_positive() || eps >= BigRational::one() {
                    return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {eps}")));
                }
                Ok(GrowthClass::SubLinear { epsilon: eps })
            }
            _ => Err(bad()),
        }
    }
}

/// Sampled ratios behind a growth check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub pass: bool,
    pub points: Vec<f64>,
    /// `f(x)/x^a` for the lower comparison exponent `a`.
    pub lower_exponent: String,
    pub lower_ratios: Vec<f64>,
    /// `f(x)/x^b` for the upper comparison exponent `b`.
    pub upper_exponent: String,
    pub upper_ratios: Vec<f64>,
    pub message: String,
}

fn ratios(f: &LEFunction, a: &BigRational, points: &[BigRational]) -> Result<Vec<f64>> {
    let e = div(f.expr().clone(), pow(Expr::Var, a.clone()));
    points
        .iter()
        .map(|x| {
            let iv = eval_interval(&e, &Interval::from_rational(x, 200), 192, f.config().exponent_cap)?;
            let m = iv.mid().to_rational();
            Ok(m.to_f64().unwrap_or(f64::NAN))
        })
        .collect()
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Differences of successive ratios shrink, allowing for rounding noise.
fn settling(v: &[f64]) -> bool {
    let scale = v.iter().fold(0f64, |m, x| m.max(x.abs()));
    let d: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    d.windows(2).all(|w| w[1] <= w[0] + 1e-12 * scale)
}

/// Numeric sanity check of a declared growth class at geometrically spaced
/// points between `10^3` and `10^9`. Not a proof.
pub fn classify_growth_check(f: &LEFunction, g: &GrowthClass, samples: usize) -> Result<GrowthReport> {
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    let points: Vec<BigRational> = (0..samples)
        .map(|i| {
            let e = 3.0 + 6.0 * i as f64 / (samples - 1) as f64;
            let v = 10f64.powf(e).round() as i64;
            BigRational::from_integer(v.max(f.x0()).into())
        })
        .collect();
    let (a, b) = match g {
        GrowthClass::SuperLinearStrict { d } => (rat(*d as i64 - 1, 1), rat(*d as i64, 1)),
        GrowthClass::ExactPolynomial { d, .. } => (rat(*d as i64 - 1, 1), rat(*d as i64, 1)),
        GrowthClass::NearLinear => (rat(1, 1), rat(2, 1)),
        GrowthClass::SubLinear { epsilon } => (epsilon.clone(), rat(1, 1)),
    };
    let lower = ratios(f, &a, &points)?;
    let upper = ratios(f, &b, &points)?;
    let (pass, message) = match g {
        GrowthClass::ExactPolynomial { alpha_hint, .. } => {
            let n = lower.len();
            let settle = settling(&lower) && decreasing(&upper) && lower[n - 1].is_finite();
            let near_alpha = match alpha_hint {
                Some(al) => {
                    let tol = (10.0 * (lower[n - 1] - lower[n - 2]).abs()).max(1e-9 * al.abs().max(1.0));
                    (lower[n - 1] - al).abs() <= tol
                }
                None => lower[n - 1].abs() > 0.0,
            };
            let ok = settle && near_alpha;
            let msg = if ok {
                format!("f(x)/x^{a} settles near {:.12}", lower[n - 1])
            } else {
                format!("f(x)/x^{a} does not settle at the hinted constant")
            };
            (ok, msg)
        }
        _ => {
            let up = increasing(&lower);
            let down = decreasing(&upper);
            let msg = match (up, down) {
                (true, true) => format!("f(x)/x^{a} increases and f(x)/x^{b} decreases"),
                (false, _) => format!("f(x)/x^{a} is not increasing"),
                (_, false) => format!("f(x)/x^{b} is not decreasing"),
            };
            (up && down, msg)
        }
    };
    Ok(GrowthReport {
        pass,
        points: points.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect(),
        lower_exponent: a.to_string(),
        lower_ratios: lower,
        upper_exponent: b.to_string(),
        upper_ratios: upper,
        message,
    })
}

impl GrowthClass {
    pub fn degree(&self) -> Option<u32> {
        match self {
            GrowthClass::SuperLinearStrict { d } | GrowthClass::ExactPolynomial { d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> Option<&BigRational> {
        match self {
            GrowthClass::SubLinear { epsilon } => Some(epsilon),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(f: &str, g: &str) -> bool {
        classify_growth_check(&LEFunction::parse(f).unwrap(), &g.parse().unwrap(), 7).unwrap().pass
    }

    #[test]
    fn examples() {
        assert!(check("x^(5/2)", "super:3"));
        assert!(check("x^(3/2)", "near"));
        assert!(!check("x^(3/2)", "sub:1/2"));
        assert!(check("sqrt(2)*x^2", "exact:3:1.4142135623730951"));
        assert!(check("x^(2/3)", "sub:1/2"));
        assert!(!check("x^(5/2)", "near"));
    }

    #[test]
    fn class_strings_round_trip() {
        for s in ["super:3", "exact:3", "exact:4:2.5", "near", "sub:2/3"] {
            let g: GrowthClass = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("super:2".parse::<GrowthClass>().is_err());
        assert!("sub:3/2".parse::<GrowthClass>().is_err());
    }
}
