//! Force laws for springs and cables, and their series/parallel composition.
//!
//! All elements are tension-only: an extension `x <= 0` carries no force.
//! Lengths are in meters and forces in newtons.

use crate::error::{ensure_finite, Error, Result};

/// Tolerance on the common force when solving a nonlinear series chain (N).
const SERIES_FORCE_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 400;
const MAX_DOUBLINGS: usize = 2000;

/// A single tension element.
#[derive(Debug, Clone, PartialEq)]
pub enum SpringElement {
    /// Hookean spring, `F = k x`.
    Linear {
        /// Stiffness (N/m).
        k: f64,
    },
    /// Combined law `F = k_l x + k_q x²`.
    Quadratic {
        /// Linear coefficient (N/m).
        k_l: f64,
        /// Quadratic coefficient (N/m²).
        k_q: f64,
    },
    /// An element in series with a slack cable; carries force only once the
    /// extension exceeds `engagement_offset`.
    SlackOffset {
        inner: Box<SpringElement>,
        /// Slack length taken up before the inner element engages (m).
        engagement_offset: f64,
    },
}

impl SpringElement {
    pub fn linear(k: f64) -> Result<Self> {
        let e = SpringElement::Linear { k };
        e.validate()?;
        Ok(e)
    }

    pub fn quadratic(k_l: f64, k_q: f64) -> Result<Self> {
        let e = SpringElement::Quadratic { k_l, k_q };
        e.validate()?;
        Ok(e)
    }

    pub fn slack(inner: SpringElement, engagement_offset: f64) -> Result<Self> {
        let e = SpringElement::SlackOffset {
            inner: Box::new(inner),
            engagement_offset,
        };
        e.validate()?;
        Ok(e)
    }

    /// Checks that every coefficient is finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        match self {
            SpringElement::Linear { k } => non_negative("k", *k),
            SpringElement::Quadratic { k_l, k_q } => {
                non_negative("k_l", *k_l)?;
                non_negative("k_q", *k_q)
            }
            SpringElement::SlackOffset {
                inner,
                engagement_offset,
            } => {
                non_negative("engagement_offset", *engagement_offset)?;
                inner.validate()
            }
        }
    }

    /// Tension carried at extension `x`.
    pub fn force(&self, x: f64) -> Result<f64> {
        ensure_finite("extension", x)?;
        Ok(self.force_at(x))
    }

    /// Elastic energy stored at extension `x` (J), the integral of the force
    /// law from zero.
    pub fn energy(&self, x: f64) -> Result<f64> {
        ensure_finite("extension", x)?;
        Ok(self.energy_at(x))
    }

    pub(crate) fn force_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            SpringElement::Linear { k } => k * x,
            SpringElement::Quadratic { k_l, k_q } => k_l * x + k_q * x * x,
            SpringElement::SlackOffset {
                inner,
                engagement_offset,
            } => inner.force_at(x - engagement_offset),
        }
    }

    pub(crate) fn energy_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            SpringElement::Linear { k } => 0.5 * k * x * x,
            SpringElement::Quadratic { k_l, k_q } => 0.5 * k_l * x * x + k_q * x * x * x / 3.0,
            SpringElement::SlackOffset {
                inner,
                engagement_offset,
            } => inner.energy_at(x - engagement_offset),
        }
    }

    /// Smallest extension at which the element carries `force`; zero force
    /// maps to zero extension. Returns infinity when the force is never reached.
    pub(crate) fn extension_at(&self, force: f64) -> f64 {
        if force <= 0.0 {
            return 0.0;
        }
        match self {
            SpringElement::Linear { k } => {
                if *k > 0.0 {
                    force / k
                } else {
                    f64::INFINITY
                }
            }
            SpringElement::Quadratic { k_l, k_q } => quadratic_root(*k_l, *k_q, force),
            SpringElement::SlackOffset {
                inner,
                engagement_offset,
            } => engagement_offset + inner.extension_at(force),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, SpringElement::Linear { .. })
    }
}

/// Non-negative root of `k_l x + k_q x² = force`, infinity if unreachable.
fn quadratic_root(k_l: f64, k_q: f64, force: f64) -> f64 {
    if force <= 0.0 {
        return 0.0;
    }
    if k_q == 0.0 {
        return if k_l > 0.0 { force / k_l } else { f64::INFINITY };
    }
    // Rationalised form of (-k_l + sqrt(k_l² + 4 k_q F)) / (2 k_q); no cancellation.
    2.0 * force / (k_l + (k_l * k_l + 4.0 * k_q * force).sqrt())
}

/// Initial stretch `x0` that produces the pretension force `f0` in a linear or
/// quadratic element.
pub fn solve_pretension_displacement(element: &SpringElement, f0: f64) -> Result<f64> {
    ensure_finite("pretension force", f0)?;
    if f0 < 0.0 {
        return Err(Error::Domain(format!(
            "pretension force must be >= 0, got {f0}"
        )));
    }
    element.validate()?;
    let (k_l, k_q) = match element {
        SpringElement::Linear { k } => (*k, 0.0),
        SpringElement::Quadratic { k_l, k_q } => (*k_l, *k_q),
        SpringElement::SlackOffset { .. } => {
            return Err(Error::Unsupported(
                "pretension displacement requires a linear or quadratic element".into(),
            ))
        }
    };
    let x0 = quadratic_root(k_l, k_q, f0);
    if !x0.is_finite() {
        return Err(Error::Domain(
            "element has zero stiffness; pretension force cannot be reached".into(),
        ));
    }
    Ok(x0)
}

/// A finite composition tree of tension elements.
#[derive(Debug, Clone, PartialEq)]
pub enum SpringNetwork {
    Leaf(SpringElement),
    /// Children carry a common force; extensions add.
    Series(Vec<SpringNetwork>),
    /// Children share a common extension; forces add.
    Parallel(Vec<SpringNetwork>),
}

impl From<SpringElement> for SpringNetwork {
    fn from(e: SpringElement) -> Self {
        SpringNetwork::Leaf(e)
    }
}

impl SpringNetwork {
    pub fn leaf(element: SpringElement) -> Result<Self> {
        element.validate()?;
        Ok(SpringNetwork::Leaf(element))
    }

    pub fn series(children: Vec<SpringNetwork>) -> Result<Self> {
        let n = SpringNetwork::Series(children);
        n.validate()?;
        Ok(n)
    }

    pub fn parallel(children: Vec<SpringNetwork>) -> Result<Self> {
        let n = SpringNetwork::Parallel(children);
        n.validate()?;
        Ok(n)
    }

    /// Parallel linear springs of stiffness `k`, each behind a cable with the
    /// given slack length. A single offset yields a leaf.
    pub fn parallel_slack(k: f64, offsets: &[f64]) -> Result<Self> {
        let mut leaves = offsets
            .iter()
            .map(|&o| SpringElement::slack(SpringElement::linear(k)?, o).map(SpringNetwork::Leaf))
            .collect::<Result<Vec<_>>>()?;
        match leaves.len() {
            0 => Err(Error::Domain("at least one spring is required".into())),
            1 => Ok(leaves.remove(0)),
            _ => SpringNetwork::parallel(leaves),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpringNetwork::Leaf(e) => e.validate(),
            SpringNetwork::Series(c) | SpringNetwork::Parallel(c) => {
                if c.len() < 2 {
                    return Err(Error::Domain(format!(
                        "series/parallel nodes need at least 2 children, got {}",
                        c.len()
                    )));
                }
                c.iter().try_for_each(SpringNetwork::validate)
            }
        }
    }

    /// True when every leaf is a plain linear spring.
    pub fn all_linear(&self) -> bool {
        match self {
            SpringNetwork::Leaf(e) => e.is_linear(),
            SpringNetwork::Series(c) | SpringNetwork::Parallel(c) => {
                c.iter().all(SpringNetwork::all_linear)
            }
        }
    }

    /// Closed-form stiffness of an all-linear network.
    pub fn effective_linear_stiffness(&self) -> Result<f64> {
        match self {
            SpringNetwork::Leaf(SpringElement::Linear { k }) => Ok(*k),
            SpringNetwork::Leaf(other) => Err(Error::Unsupported(format!(
                "effective stiffness needs linear leaves, found {other:?}"
            ))),
            SpringNetwork::Parallel(c) => c
                .iter()
                .map(SpringNetwork::effective_linear_stiffness)
                .sum(),
            SpringNetwork::Series(c) => {
                let mut compliance = 0.0;
                for child in c {
                    let k = child.effective_linear_stiffness()?;
                    if k == 0.0 {
                        // A zero-stiffness link carries no load; keep checking the rest.
                        compliance = f64::INFINITY;
                    } else {
                        compliance += 1.0 / k;
                    }
                }
                Ok(if compliance.is_infinite() {
                    0.0
                } else {
                    1.0 / compliance
                })
            }
        }
    }

    /// Tension carried by the network at total extension `x`.
    pub fn force(&self, x: f64) -> Result<f64> {
        ensure_finite("extension", x)?;
        self.force_at(x)
    }

    /// Elastic energy stored at total extension `x` (J).
    pub fn energy(&self, x: f64) -> Result<f64> {
        ensure_finite("extension", x)?;
        self.energy_at(x)
    }

    pub(crate) fn force_at(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match self {
            SpringNetwork::Leaf(e) => Ok(e.force_at(x)),
            SpringNetwork::Parallel(c) => {
                let mut total = 0.0;
                for child in c {
                    total += child.force_at(x)?;
                }
                Ok(total)
            }
            SpringNetwork::Series(c) => {
                if self.all_linear() {
                    Ok(self.effective_linear_stiffness()? * x)
                } else {
                    series_force(c, x)
                }
            }
        }
    }

    pub(crate) fn energy_at(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match self {
            SpringNetwork::Leaf(e) => Ok(e.energy_at(x)),
            SpringNetwork::Parallel(c) => {
                let mut total = 0.0;
                for child in c {
                    total += child.energy_at(x)?;
                }
                Ok(total)
            }
            SpringNetwork::Series(c) => {
                if self.all_linear() {
                    return Ok(0.5 * self.effective_linear_stiffness()? * x * x);
                }
                let f = series_force(c, x)?;
                let mut total = 0.0;
                for child in c {
                    let xi = child.extension_at(f)?;
                    total += child.energy_at(xi)?;
                }
                Ok(total)
            }
        }
    }

    /// Extension at which the network carries `force`.
    pub(crate) fn extension_at(&self, force: f64) -> Result<f64> {
        if force <= 0.0 {
            return Ok(0.0);
        }
        match self {
            SpringNetwork::Leaf(e) => Ok(e.extension_at(force)),
            SpringNetwork::Series(c) => {
                let mut total = 0.0;
                for child in c {
                    total += child.extension_at(force)?;
                }
                Ok(total)
            }
            SpringNetwork::Parallel(_) => invert_force(|x| self.force_at(x), force),
        }
    }
}

/// Common force of a nonlinear series chain stretched to total extension `x`,
/// by bisection on the force.
fn series_force(children: &[SpringNetwork], x: f64) -> Result<f64> {
    let total_extension = |f: f64| -> Result<f64> {
        let mut sum = 0.0;
        for child in children {
            sum += child.extension_at(f)?;
        }
        Ok(sum)
    };

    let mut hi = 1.0;
    let mut doublings = 0;
    while total_extension(hi)? < x {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Numeric {
                what: "series force bracketing".into(),
                residual: x - total_extension(hi / 2.0)?,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= SERIES_FORCE_TOL || mid <= lo || mid >= hi {
            return Ok(0.5 * (lo + hi));
        }
        if total_extension(mid)? < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let f = 0.5 * (lo + hi);
    Err(Error::Numeric {
        what: "series force bisection".into(),
        residual: total_extension(f)? - x,
    })
}

/// Smallest extension at which a non-decreasing force law reaches `target`.
fn invert_force(force: impl Fn(f64) -> Result<f64>, target: f64) -> Result<f64> {
    let mut hi = 1e-3;
    let mut doublings = 0;
    while force(hi)? < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            // The law saturates below the target (e.g. zero-stiffness leaves).
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if force(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn staged() -> SpringNetwork {
        SpringNetwork::parallel_slack(388.4, &[0.0, 0.012, 0.036]).unwrap()
    }

    fn lin(k: f64) -> SpringNetwork {
        SpringNetwork::Leaf(SpringElement::Linear { k })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn element_force_examples() {
        let e = SpringElement::linear(500.0).unwrap();
        assert!(rel(e.force(0.071).unwrap(), 35.5) < 1e-12);

        let q = SpringElement::quadratic(450.0, 20000.0).unwrap();
        assert_eq!(q.force(0.0).unwrap(), 0.0);

        let s = SpringElement::slack(SpringElement::linear(388.4).unwrap(), 0.012).unwrap();
        assert_eq!(s.force(0.010).unwrap(), 0.0);
        let oracle = 388.4 * (0.022 - 0.012);
        assert!(rel(s.force(0.022).unwrap(), oracle) < 1e-12);
        assert!(rel(oracle, 3.884) < 1e-12);
    }

    #[test]
    fn negative_extension_is_slack() {
        for e in [
            SpringElement::linear(500.0).unwrap(),
            SpringElement::quadratic(450.0, 20000.0).unwrap(),
        ] {
            assert_eq!(e.force(-0.01).unwrap(), 0.0);
            assert_eq!(e.energy(-0.01).unwrap(), 0.0);
        }
        assert_eq!(staged().force(-0.3).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_extension_rejected() {
        let e = SpringElement::linear(1.0).unwrap();
        assert!(matches!(e.force(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(staged().force(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_coefficients_rejected() {
        assert!(SpringElement::linear(-1.0).is_err());
        assert!(SpringElement::quadratic(1.0, -2.0).is_err());
        assert!(SpringElement::slack(SpringElement::Linear { k: 1.0 }, -0.1).is_err());
        assert!(SpringNetwork::series(vec![lin(1.0)]).is_err());
        assert!(SpringNetwork::parallel(vec![]).is_err());
    }

    #[test]
    fn staged_network_examples() {
        let net = staged();
        let oracle = 388.4 * (0.050 + 0.038 + 0.014);
        assert!(rel(net.force(0.050).unwrap(), oracle) < 1e-12);
        assert!((oracle - 39.62).abs() < 5e-3);
        assert!(rel(net.force(0.005).unwrap(), 388.4 * 0.005) < 1e-12);
    }

    #[test]
    fn series_of_linear_springs() {
        let net = SpringNetwork::series(vec![lin(500.0), lin(500.0)]).unwrap();
        assert!(rel(net.effective_linear_stiffness().unwrap(), 250.0) < 1e-15);
        assert!(rel(net.force(0.010).unwrap(), 2.5) < 1e-12);
    }

    #[test]
    fn effective_stiffness_examples() {
        let par = SpringNetwork::parallel(vec![lin(388.4), lin(388.4), lin(388.4)]).unwrap();
        assert!(rel(par.effective_linear_stiffness().unwrap(), 1165.2) < 1e-12);
        assert_eq!(lin(388.4).effective_linear_stiffness().unwrap(), 388.4);
        assert!(matches!(
            staged().effective_linear_stiffness(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn series_with_zero_link_carries_nothing() {
        let net = SpringNetwork::series(vec![lin(0.0), lin(500.0)]).unwrap();
        assert_eq!(net.effective_linear_stiffness().unwrap(), 0.0);
        assert_eq!(net.force(0.1).unwrap(), 0.0);
    }

    #[test]
    fn nonlinear_series_solve() {
        // Quadratic spring in series with a linear cable: check the common force
        // reproduces the total extension.
        let q = SpringElement::quadratic(450.0, 20000.0).unwrap();
        let cable = SpringElement::linear(5000.0).unwrap();
        let net = SpringNetwork::series(vec![
            SpringNetwork::Leaf(q.clone()),
            SpringNetwork::Leaf(cable.clone()),
        ])
        .unwrap();
        let x = 0.03;
        let f = net.force(x).unwrap();
        let xq = solve_pretension_displacement(&q, f).unwrap();
        let xc = f / 5000.0;
        assert!((xq + xc - x).abs() < 1e-12);
    }

    #[test]
    fn series_slack_chain_stays_zero_until_engaged() {
        let a = SpringElement::slack(SpringElement::linear(400.0).unwrap(), 0.01).unwrap();
        let b = SpringElement::slack(SpringElement::linear(400.0).unwrap(), 0.02).unwrap();
        let net = SpringNetwork::series(vec![a.into(), b.into()]).unwrap();
        assert!(net.force(0.029).unwrap() < 1e-9);
        // Past the combined slack the chain behaves as the 200 N/m series pair.
        assert!((net.force(0.04).unwrap() - 200.0 * 0.01).abs() < 1e-9);
    }

    #[test]
    fn series_energy_matches_integrated_force() {
        let q = SpringElement::quadratic(450.0, 20000.0).unwrap();
        let net = SpringNetwork::series(vec![q.into(), lin(900.0)]).unwrap();
        let x = 0.04;
        let n = 4000;
        let h = x / n as f64;
        // Simpson's rule on the force law.
        let mut s = net.force(0.0).unwrap() + net.force(x).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * net.force(i as f64 * h).unwrap();
        }
        let integral = s * h / 3.0;
        assert!(rel(net.energy(x).unwrap(), integral) < 1e-8);
    }

    #[test]
    fn pretension_examples() {
        let q = SpringElement::quadratic(450.0, 20000.0).unwrap();
        assert_eq!(solve_pretension_displacement(&q, 0.0).unwrap(), 0.0);
        let x0 = solve_pretension_displacement(&q, 10.0).unwrap();
        assert!((x0 - 0.0137813).abs() < 1e-7);
        assert!((450.0 * x0 + 20000.0 * x0 * x0 - 10.0).abs() <= 1e-12 * 10.0);

        let l = SpringElement::quadratic(450.0, 0.0).unwrap();
        assert!((solve_pretension_displacement(&l, 9.0).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn pretension_errors() {
        let q = SpringElement::quadratic(450.0, 20000.0).unwrap();
        assert!(matches!(
            solve_pretension_displacement(&q, -1.0),
            Err(Error::Domain(_))
        ));
        let s = SpringElement::slack(q, 0.01).unwrap();
        assert!(matches!(
            solve_pretension_displacement(&s, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn staged_piecewise_tangents() {
        let net = staged();
        let h = 1e-6;
        let tangent = |x: f64| (net.force(x + h).unwrap() - net.force(x - h).unwrap()) / (2.0 * h);
        let cases = [
            ((0.0, 0.012), 388.4),
            ((0.012, 0.036), 776.8),
            ((0.036, 0.050), 1165.2),
        ];
        for ((a, b), expected) in cases {
            for i in 1..50 {
                let x = a + (b - a) * i as f64 / 50.0;
                assert!(rel(tangent(x), expected) < 1e-3, "x={x}");
            }
        }
    }

    #[test]
    fn slack_continuity() {
        let s = SpringElement::slack(SpringElement::linear(388.4).unwrap(), 0.012).unwrap();
        assert_eq!(s.force(0.012).unwrap(), 0.0);
        assert!(s.force(0.012 + 1e-12).unwrap() < 1e-9);
    }

    fn arb_element() -> impl Strategy<Value = SpringElement> {
        let base = prop_oneof![
            (0.0..2000.0f64).prop_map(|k| SpringElement::Linear { k }),
            (0.0..2000.0f64, 0.0..50000.0f64)
                .prop_map(|(k_l, k_q)| SpringElement::Quadratic { k_l, k_q }),
        ];
        (base, proptest::option::of(0.0..0.05f64)).prop_map(|(e, off)| match off {
            Some(o) => SpringElement::SlackOffset {
                inner: Box::new(e),
                engagement_offset: o,
            },
            None => e,
        })
    }

    fn arb_network() -> impl Strategy<Value = SpringNetwork> {
        arb_element()
            .prop_map(SpringNetwork::Leaf)
            .prop_recursive(2, 8, 3, |inner| {
                prop_oneof![
                    prop::collection::vec(inner.clone(), 2..4).prop_map(SpringNetwork::Series),
                    prop::collection::vec(inner, 2..4).prop_map(SpringNetwork::Parallel),
                ]
            })
    }

    proptest! {
        #[test]
        fn networks_are_monotone(net in arb_network(), a in 0.0..0.2f64, b in 0.0..0.2f64) {
            let (x1, x2) = if a < b { (a, b) } else { (b, a) };
            let f1 = net.force(x1).unwrap();
            let f2 = net.force(x2).unwrap();
            prop_assert!(f1 <= f2 + 1e-9 * f2.abs().max(1.0));
        }

        #[test]
        fn parallel_is_additive(a in arb_network(), b in arb_network(), x in 0.0..0.2f64) {
            let fa = a.force(x).unwrap();
            let fb = b.force(x).unwrap();
            let both = SpringNetwork::Parallel(vec![a, b]).force(x).unwrap();
            prop_assert!((both - (fa + fb)).abs() <= 4.0 * f64::EPSILON * (fa + fb).abs());
        }

        #[test]
        fn pretension_root_residual(k_l in 0.0..2000.0f64, k_q in 1e-3..1e5f64, f0 in 0.0..500.0f64) {
            let e = SpringElement::Quadratic { k_l, k_q };
            let x0 = solve_pretension_displacement(&e, f0).unwrap();
            prop_assert!(x0 >= 0.0);
            let residual = (k_l * x0 + k_q * x0 * x0 - f0).abs();
            prop_assert!(residual <= 1e-12 * f0.max(1.0));
        }
    }
}
