//! The eleven benchmark functions with their boxes and uncertainty radii.
//!
//! Every formula is defined on all of `R^n`; shifted functions place their
//! nominal optimum inside the box.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, ObjectiveError, Result};
use crate::problem::{BoxDomain, Objective, Problem};

/// Dimensions of the multi-dimensional part of the benchmark grid.
pub const GRID_DIMENSIONS: [usize; 6] = [2, 5, 10, 30, 60, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestFunction {
    Rastrigin,
    MultipeakF1,
    MultipeakF2,
    BrankesMultipeak,
    Pickelhaube,
    HeavisideSphere,
    Sawtooth,
    Ackley,
    Sphere,
    Rosenbrock,
    Polynomial2D,
}

impl TestFunction {
    pub const ALL: [TestFunction; 11] = [
        TestFunction::Rastrigin,
        TestFunction::MultipeakF1,
        TestFunction::MultipeakF2,
        TestFunction::BrankesMultipeak,
        TestFunction::Pickelhaube,
        TestFunction::HeavisideSphere,
        TestFunction::Sawtooth,
        TestFunction::Ackley,
        TestFunction::Sphere,
        TestFunction::Rosenbrock,
        TestFunction::Polynomial2D,
    ];

    /// Identifier used on the command line and in result files.
    pub fn cli_name(self) -> &'static str {
        match self {
            TestFunction::Rastrigin => "rastrigin",
            TestFunction::MultipeakF1 => "multipeakf1",
            TestFunction::MultipeakF2 => "multipeakf2",
            TestFunction::BrankesMultipeak => "brankes-multipeak",
            TestFunction::Pickelhaube => "pickelhaube",
            TestFunction::HeavisideSphere => "heaviside-sphere",
            TestFunction::Sawtooth => "sawtooth",
            TestFunction::Ackley => "ackley",
            TestFunction::Sphere => "sphere",
            TestFunction::Rosenbrock => "rosenbrock",
            TestFunction::Polynomial2D => "2d-polynomial",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            TestFunction::Rastrigin => "Rastrigin",
            TestFunction::MultipeakF1 => "MultipeakF1",
            TestFunction::MultipeakF2 => "MultipeakF2",
            TestFunction::BrankesMultipeak => "Branke's Multipeak",
            TestFunction::Pickelhaube => "Pickelhaube",
            TestFunction::HeavisideSphere => "Heaviside Sphere",
            TestFunction::Sawtooth => "Sawtooth",
            TestFunction::Ackley => "Ackley",
            TestFunction::Sphere => "Sphere",
            TestFunction::Rosenbrock => "Rosenbrock",
            TestFunction::Polynomial2D => "2D polynomial",
        }
    }

    /// Per-coordinate bounds `[l, u]` of the box `[l, u]^n`.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            TestFunction::Rastrigin => (14.88, 25.12),
            TestFunction::MultipeakF1 => (-5.0, -4.0),
            TestFunction::MultipeakF2 => (10.0, 20.0),
            TestFunction::BrankesMultipeak => (-7.0, -3.0),
            TestFunction::Pickelhaube => (-40.0, -20.0),
            TestFunction::HeavisideSphere => (-30.0, -10.0),
            TestFunction::Sawtooth => (-6.0, -4.0),
            TestFunction::Ackley => (17.232, 82.768),
            TestFunction::Sphere => (15.0, 25.0),
            TestFunction::Rosenbrock => (7.952, 12.048),
            TestFunction::Polynomial2D => (-1.0, 4.0),
        }
    }

    pub fn gamma(self) -> f64 {
        match self {
            TestFunction::Rastrigin => 0.5,
            TestFunction::MultipeakF1 => 0.0625,
            TestFunction::MultipeakF2 => 0.5,
            TestFunction::BrankesMultipeak => 0.5,
            TestFunction::Pickelhaube => 1.0,
            TestFunction::HeavisideSphere => 1.0,
            TestFunction::Sawtooth => 0.2,
            TestFunction::Ackley => 3.0,
            TestFunction::Sphere => 1.0,
            TestFunction::Rosenbrock => 0.25,
            TestFunction::Polynomial2D => 0.5,
        }
    }

    /// `Some(n)` for functions only defined at one dimension.
    pub fn fixed_dimension(self) -> Option<usize> {
        match self {
            TestFunction::Polynomial2D => Some(2),
            _ => None,
        }
    }

    pub fn check_dimension(self, n: usize) -> Result<()> {
        match self.fixed_dimension() {
            Some(d) if d != n => Err(Error::InvalidProblem(format!(
                "{} is only defined for n = {d}, got n = {n}",
                self.display_name()
            ))),
            _ if n == 0 => Err(Error::InvalidProblem("dimension must be at least 1".into())),
            _ => Ok(()),
        }
    }

    pub fn evaluate(self, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        match self {
            TestFunction::Rastrigin => {
                10.0 * n
                    + x.iter()
                        .map(|v| {
                            let z = v - 20.0;
                            z * z - 10.0 * (2.0 * PI * z).cos()
                        })
                        .sum::<f64>()
            }
            TestFunction::MultipeakF1 => -x.iter().map(|&v| multipeak_f1_term(v)).sum::<f64>() / n,
            TestFunction::MultipeakF2 => x.iter().map(|&v| multipeak_f2_term(v)).sum::<f64>() / n,
            TestFunction::BrankesMultipeak => {
                BRANKE_C1.max(BRANKE_C2) - x.iter().map(|&v| branke_term(v)).sum::<f64>() / n
            }
            TestFunction::Pickelhaube => pickelhaube(x),
            TestFunction::HeavisideSphere => {
                let all_low = x.iter().all(|v| v + 20.0 <= 0.0);
                let step = if all_low { 0.0 } else { 1.0 };
                step + x.iter().map(|v| ((v + 20.0) / 10.0).powi(2)).sum::<f64>()
            }
            TestFunction::Sawtooth => 1.0 - x.iter().map(|&v| sawtooth_term(v)).sum::<f64>() / n,
            TestFunction::Ackley => {
                let sq = x.iter().map(|v| (v - 50.0).powi(2)).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * (v - 50.0)).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            TestFunction::Sphere => x.iter().map(|v| (v - 20.0).powi(2)).sum(),
            TestFunction::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] - 10.0, w[1] - 10.0);
                    100.0 * (b - a * a).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            TestFunction::Polynomial2D => polynomial_2d(x[0], x[1]),
        }
    }

    /// Build the benchmark instance at dimension `n`.
    pub fn instance(self, n: usize) -> Result<Problem> {
        self.check_dimension(n)?;
        let (l, u) = self.bounds();
        Problem::new(Arc::new(self), BoxDomain::cube(l, u, n)?, self.gamma())
    }

    /// Every `(function, dimension)` pair of the full benchmark grid
    /// (ten functions at six dimensions plus the 2D polynomial).
    pub fn grid() -> Vec<(TestFunction, usize)> {
        let mut out = Vec::with_capacity(61);
        for f in TestFunction::ALL {
            match f.fixed_dimension() {
                Some(d) => out.push((f, d)),
                None => out.extend(GRID_DIMENSIONS.iter().map(|&n| (f, n))),
            }
        }
        out
    }
}

impl Objective for TestFunction {
    fn value(&self, x: &[f64]) -> std::result::Result<f64, ObjectiveError> {
        Ok(self.evaluate(x))
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// Accepts the CLI identifier or the display name in any case.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_lowercase()
            .chars()
            .filter(|c| *c != '\'')
            .map(|c| if c == ' ' || c == '_' { '-' } else { c })
            .collect();
        let key = match key.as_str() {
            "ackleys" => "ackley",
            "polynomial" => "2d-polynomial",
            "multipeak-f1" => "multipeakf1",
            "multipeak-f2" => "multipeakf2",
            other => other,
        };
        TestFunction::ALL
            .into_iter()
            .find(|f| f.cli_name() == key)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

/// Benchmark instance by name.
pub fn make_instance(name: &str, n: usize) -> Result<Problem> {
    name.parse::<TestFunction>()?.instance(n)
}

/// Objective value of a named benchmark function.
pub fn evaluate_named(name: &str, x: &[f64]) -> Result<f64> {
    let f: TestFunction = name.parse()?;
    f.check_dimension(x.len())?;
    Ok(f.evaluate(x))
}

fn multipeak_f1_term(v: f64) -> f64 {
    let z = v + 5.0;
    let envelope = (-2.0 * 2f64.ln() * ((z - 0.1) / 0.8).powi(2)).exp();
    let s = (5.0 * PI * z).sin();
    if 0.4 < z && z <= 0.6 {
        envelope * s.abs().sqrt()
    } else {
        envelope * s.powi(6)
    }
}

fn multipeak_f2_term(v: f64) -> f64 {
    let z = v - 10.0;
    2.0 * (10.0 * (-0.2 * z).exp() * z).sin() * (-0.25 * z).exp()
}

const BRANKE_B1: f64 = 2.0;
const BRANKE_B2: f64 = 2.0;
const BRANKE_C1: f64 = 1.0;
const BRANKE_C2: f64 = 1.3;

fn branke_term(v: f64) -> f64 {
    let z = v + 5.0;
    if (-BRANKE_B1..0.0).contains(&z) {
        BRANKE_C1 * (1.0 - 4.0 * (z + BRANKE_B1 / 2.0).powi(2) / (BRANKE_B1 * BRANKE_B1))
    } else if (0.0..=BRANKE_B2).contains(&z) {
        BRANKE_C2 * 16f64.powf(-2.0 * (BRANKE_B2 - 2.0 * z).abs() / BRANKE_B2)
    } else {
        0.0
    }
}

fn sawtooth_term(v: f64) -> f64 {
    let z = v + 5.0;
    if (-0.8..0.2).contains(&z) {
        z + 0.8
    } else {
        0.0
    }
}

const PICKEL_C1: f64 = 625.0 / 624.0;
const PICKEL_C2: f64 = 1.5975;
const PICKEL_D2: f64 = 1.1513;

fn pickelhaube(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let norm_shift = |s: f64| x.iter().map(|v| (v + s).powi(2)).sum::<f64>().sqrt();
    let peak = 5.0 / (5.0 - 5f64.sqrt());
    let scale = 5.0 * n.sqrt();
    let g0 = 0.1 * (-0.5 * norm_shift(30.0)).exp();
    let r1 = norm_shift(35.0) / scale;
    let g1a = peak * (1.0 - r1.sqrt());
    let g1b = PICKEL_C1 * (1.0 - r1.powi(4));
    let r2 = norm_shift(25.0) / scale;
    let g2 = PICKEL_C2 * (1.0 - r2.powf(PICKEL_D2));
    peak - g0.max(g1a).max(g1b).max(g2)
}

fn polynomial_2d(x: f64, y: f64) -> f64 {
    2.0 * x.powi(6) - 12.2 * x.powi(5) + 21.2 * x.powi(4) + 6.2 * x - 6.4 * x.powi(3)
        - 4.7 * x * x
        + y.powi(6)
        - 11.0 * y.powi(5)
        + 43.3 * y.powi(4)
        - 10.0 * y
        - 74.8 * y.powi(3)
        + 56.9 * y * y
        - 4.1 * x * y
        - 0.1 * y * y * x * x
        + 0.4 * y * y * x
        + 0.4 * x * x * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_domains_and_radii() {
        let p = make_instance("Sphere", 5).unwrap();
        assert_eq!(p.domain(), &BoxDomain::cube(15.0, 25.0, 5).unwrap());
        assert_eq!(p.gamma(), 1.0);
        let p = make_instance("Ackley", 10).unwrap();
        assert_eq!(p.domain(), &BoxDomain::cube(17.232, 82.768, 10).unwrap());
        assert_eq!(p.gamma(), 3.0);
        let p = make_instance("2D polynomial", 2).unwrap();
        assert_eq!(p.domain(), &BoxDomain::cube(-1.0, 4.0, 2).unwrap());
        assert_eq!(p.gamma(), 0.5);
        assert!(make_instance("2d-polynomial", 3).is_err());
        assert!(make_instance("no-such-function", 2).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in TestFunction::ALL {
            assert_eq!(f.cli_name().parse::<TestFunction>().unwrap(), f);
            assert_eq!(f.display_name().parse::<TestFunction>().unwrap(), f);
        }
        assert_eq!(
            "brankes-multipeak".parse::<TestFunction>().unwrap(),
            TestFunction::BrankesMultipeak
        );
    }

    #[test]
    fn grid_has_61_instances() {
        assert_eq!(TestFunction::grid().len(), 61);
    }

    #[test]
    fn known_values() {
        assert_eq!(evaluate_named("sphere", &[20.0; 4]).unwrap(), 0.0);
        assert_abs_diff_eq!(evaluate_named("rastrigin", &[20.0; 3]).unwrap(), 0.0);
        for n in [1, 2, 7] {
            assert_abs_diff_eq!(
                evaluate_named("ackley", &vec![50.0; n]).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
        assert_eq!(evaluate_named("2d-polynomial", &[0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            evaluate_named("pickelhaube", &[-30.0, -30.0]).unwrap(),
            5.0 / (5.0 - 5f64.sqrt()) - 0.1,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            evaluate_named("pickelhaube", &[-30.0, -30.0]).unwrap(),
            1.709017,
            epsilon = 1e-6
        );
        assert_eq!(evaluate_named("rosenbrock", &[11.0, 11.0]).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_robust_region_value() {
        // grid search with a Γ=0.5 ring sampler puts the robust optimum near
        // (-0.18, 0.30) with worst case about 4.34
        let v = polynomial_2d(-0.18, 0.30);
        assert!(v < 4.34);
    }

    #[test]
    fn multipeak_f1_branches() {
        // z = x + 5; 0.4 < z <= 0.6 takes the sqrt branch
        let z = 0.5;
        let env = (-2.0 * 2f64.ln() * ((z - 0.1) / 0.8f64).powi(2)).exp();
        assert_abs_diff_eq!(
            multipeak_f1_term(z - 5.0),
            env * (5.0 * PI * z).sin().abs().sqrt(),
            epsilon = 1e-15
        );
        // either side of the sqrt window, at exactly representable shifts
        for z in [0.375_f64, 0.625] {
            let env = (-2.0 * 2f64.ln() * ((z - 0.1) / 0.8f64).powi(2)).exp();
            assert_abs_diff_eq!(
                multipeak_f1_term(z - 5.0),
                env * (5.0 * PI * z).sin().powi(6),
                epsilon = 1e-15
            );
        }
        let z = 0.59375_f64;
        let env = (-2.0 * 2f64.ln() * ((z - 0.1) / 0.8f64).powi(2)).exp();
        assert_abs_diff_eq!(
            multipeak_f1_term(z - 5.0),
            env * (5.0 * PI * z).sin().abs().sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(multipeak_f1_term(-4.9), (5.0 * PI * 0.1f64).sin().powi(6));
    }

    #[test]
    fn branke_branches() {
        // left parabola peaks at z = -1 with c1
        assert_abs_diff_eq!(branke_term(-6.0), BRANKE_C1);
        assert_abs_diff_eq!(branke_term(-7.0), 0.0);
        // right peak at z = 1 with c2; z = 0 and z = 2 give c2 / 256
        assert_abs_diff_eq!(branke_term(-4.0), BRANKE_C2);
        assert_abs_diff_eq!(branke_term(-5.0), BRANKE_C2 / 256.0);
        assert_abs_diff_eq!(branke_term(-3.0), BRANKE_C2 / 256.0);
        // outside both
        assert_eq!(branke_term(-2.9), 0.0);
        assert_eq!(branke_term(-7.1), 0.0);
        assert_abs_diff_eq!(
            TestFunction::BrankesMultipeak.evaluate(&[-4.0, -4.0]),
            0.0
        );
    }

    #[test]
    fn sawtooth_branches() {
        assert_abs_diff_eq!(sawtooth_term(-5.8), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sawtooth_term(-5.0), 0.8, epsilon = 1e-12);
        // jump at z = 0.2
        assert!(sawtooth_term(-4.8 - 1e-9) > 0.99);
        assert_eq!(sawtooth_term(-4.8 + 1e-9), 0.0);
        assert_eq!(sawtooth_term(-5.9), 0.0);
        assert_abs_diff_eq!(TestFunction::Sawtooth.evaluate(&[-5.0, -5.0]), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn heaviside_branches() {
        // every coordinate at or below -20: product is 1
        assert_abs_diff_eq!(TestFunction::HeavisideSphere.evaluate(&[-20.0, -20.0]), 0.0);
        assert_abs_diff_eq!(TestFunction::HeavisideSphere.evaluate(&[-30.0, -20.0]), 1.0);
        // one coordinate above: step of 1
        assert_abs_diff_eq!(
            TestFunction::HeavisideSphere.evaluate(&[-10.0, -20.0]),
            2.0
        );
    }

    #[test]
    fn pickelhaube_max_terms() {
        // at the nominal optimum (-35, ..): g1a = g1b peak
        let peak = 5.0 / (5.0 - 5f64.sqrt());
        let v = TestFunction::Pickelhaube.evaluate(&[-35.0, -35.0]);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        // at (-25, ..): g2 = c2 dominates
        let v = TestFunction::Pickelhaube.evaluate(&[-25.0, -25.0]);
        assert_abs_diff_eq!(v, peak - PICKEL_C2, epsilon = 1e-12);
    }

    #[test]
    fn multipeak_f2_separable() {
        for &v in &[10.0, 12.3, 17.9] {
            assert_abs_diff_eq!(
                TestFunction::MultipeakF2.evaluate(&[v, v, v]),
                multipeak_f2_term(v),
                epsilon = 1e-12
            );
        }
        assert_eq!(multipeak_f2_term(10.0), 0.0);
    }
}
