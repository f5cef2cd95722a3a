//! Bijections between the constrained parameter space and the
//! unconstrained space the random walk moves in.

/// One-dimensional bijection from an interval onto the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bijector {
    Identity,
    /// `(0, inf) -> R` via `ln`.
    Log,
    /// `(lo, hi) -> R` via a scaled logit.
    Logit { lo: f64, hi: f64 },
}

impl Bijector {
    pub fn forward(&self, x: f64) -> f64 {
        match *self {
            Bijector::Identity => x,
            Bijector::Log => x.ln(),
            Bijector::Logit { lo, hi } => {
                let u = (x - lo) / (hi - lo);
                u.ln() - (-u).ln_1p()
            }
        }
    }

    pub fn inverse(&self, z: f64) -> f64 {
        match *self {
            Bijector::Identity => z,
            Bijector::Log => z.exp(),
            Bijector::Logit { lo, hi } => lo + (hi - lo) * logistic(z),
        }
    }

    /// `ln |d inverse / dz|`.
    pub fn log_jacobian(&self, z: f64) -> f64 {
        match *self {
            Bijector::Identity => 0.0,
            Bijector::Log => z,
            // logistic'(z) = s(z) s(-z); ln s(z) = -ln(1 + e^-z)
            Bijector::Logit { lo, hi } => (hi - lo).ln() - softplus(-z) - softplus(z),
        }
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Componentwise transform where a component may be measured as an offset
/// from an earlier component (`theta_i = theta_base + inverse_i(z_i)`).
///
/// The Jacobian of such a map is triangular, so its log-determinant is the
/// sum of the componentwise terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTransform {
    parts: Vec<(Bijector, Option<usize>)>,
}

impl ParameterTransform {
    pub fn identity(p: usize) -> Self {
        ParameterTransform { parts: vec![(Bijector::Identity, None); p] }
    }

    pub fn componentwise(bijectors: Vec<Bijector>) -> Self {
        ParameterTransform { parts: bijectors.into_iter().map(|b| (b, None)).collect() }
    }

    /// Builds from `(bijector, base)` pairs; every base must precede its component.
    pub fn with_offsets(parts: Vec<(Bijector, Option<usize>)>) -> Self {
        for (i, (_, base)) in parts.iter().enumerate() {
            if let Some(b) = base {
                assert!(*b < i, "offset base must precede the component");
            }
        }
        ParameterTransform { parts }
    }

    /// Box-logit transform for independent interval constraints.
    pub fn logit_box(bounds: &[(f64, f64)]) -> Self {
        Self::componentwise(bounds.iter().map(|&(lo, hi)| Bijector::Logit { lo, hi }).collect())
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    /// Constrained to unconstrained.
    pub fn forward(&self, theta: &[f64]) -> Vec<f64> {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, (b, base))| {
                let offset = base.map_or(0.0, |k| theta[k]);
                b.forward(theta[i] - offset)
            })
            .collect()
    }

    /// Unconstrained to constrained.
    pub fn inverse(&self, z: &[f64]) -> Vec<f64> {
        let mut theta = Vec::with_capacity(z.len());
        for (i, (b, base)) in self.parts.iter().enumerate() {
            let offset = base.map_or(0.0, |k| theta[k]);
            theta.push(offset + b.inverse(z[i]));
        }
        theta
    }

    /// `ln |det d inverse / dz|` at `z`.
    pub fn log_jacobian(&self, z: &[f64]) -> f64 {
        self.parts.iter().zip(z).map(|((b, _), &zi)| b.log_jacobian(zi)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn mg1_like() -> ParameterTransform {
        ParameterTransform::with_offsets(vec![
            (Bijector::Logit { lo: 0.0, hi: 10.0 }, None),
            (Bijector::Logit { lo: 0.0, hi: 10.0 }, Some(0)),
            (Bijector::Log, None),
        ])
    }

    #[test]
    fn round_trip() {
        let t = mg1_like();
        let theta = [1.0, 5.0, 0.2];
        let back = t.inverse(&t.forward(&theta));
        for (a, b) in theta.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn log_jacobian_matches_finite_differences() {
        let t = mg1_like();
        let z = [0.3, -1.2, 0.7];
        let h = 1e-6;
        let jac = DMatrix::from_fn(3, 3, |i, j| {
            let mut zp = z;
            let mut zm = z;
            zp[j] += h;
            zm[j] -= h;
            (t.inverse(&zp)[i] - t.inverse(&zm)[i]) / (2.0 * h)
        });
        let numeric = jac.determinant().abs().ln();
        let analytic = t.log_jacobian(&z);
        assert!(((numeric - analytic) / analytic).abs() < 1e-5, "{numeric} vs {analytic}");
    }

    #[test]
    fn extreme_logits_stay_finite() {
        let b = Bijector::Logit { lo: 0.0, hi: 1.0 };
        assert!(b.log_jacobian(800.0).is_finite());
        assert!(b.log_jacobian(-800.0).is_finite());
        assert_eq!(b.inverse(-800.0), 0.0);
    }
}
