//! Killing-form test on a coordinate patch: a form `ω` is Killing when
//! `(∇_v ω)(v, ·, …, ·) = 0` for every tangent vector `v`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metric on the patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchMetric {
    Flat,
    /// Poincaré ball `4|dx|²/(1 − |x|²)²`.
    PoincareBall,
}

impl PatchMetric {
    /// Gradient of the log conformal factor `φ`, with `g = e^{2φ}δ`.
    fn dphi(&self, x: &[f64]) -> Vec<f64> {
        match self {
            PatchMetric::Flat => vec![0.0; x.len()],
            PatchMetric::PoincareBall => {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                x.iter().map(|c| 2.0 * c / (1.0 - r2)).collect()
            }
        }
    }

    /// Christoffel symbols `Γ^k_ij = δ_ik φ_j + δ_jk φ_i − δ_ij φ_k`, as `[k][i][j]`.
    pub fn christoffel(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let p = self.dphi(x);
        let mut g = vec![0.0; d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = 0.0;
                    if i == k {
                        v += p[j];
                    }
                    if j == k {
                        v += p[i];
                    }
                    if i == j {
                        v -= p[k];
                    }
                    g[(k * d + i) * d + j] = v;
                }
            }
        }
        g
    }

    /// Points are drawn from the ball of this radius.
    fn sample_radius(&self) -> f64 {
        match self {
            PatchMetric::Flat => 1.0,
            PatchMetric::PoincareBall => 0.8,
        }
    }
}

/// A differential form of degree `degree` on a patch of `ℝ^dim`, given by its
/// full antisymmetric component array and the first partial derivatives.
pub struct FormField<'a> {
    pub dim: usize,
    pub degree: usize,
    /// `ω_{i₁…i_r}` in row-major order, `dim^degree` entries.
    pub value: Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>,
    /// `∂_j ω_{i₁…i_r}` with `j` as the leading index.
    pub derivative: Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>,
}

impl<'a> FormField<'a> {
    /// Constant components.
    pub fn constant(dim: usize, degree: usize, components: Vec<f64>) -> Self {
        let zeros = vec![0.0; components.len() * dim];
        FormField {
            dim,
            degree,
            value: Box::new(move |_| components.clone()),
            derivative: Box::new(move |_| zeros.clone()),
        }
    }
}

/// `ω(v, ·, …, ·)` after `∇_v`, with `v` contracted into the first slot.
fn contracted_derivative(form: &FormField, metric: PatchMetric, x: &[f64], v: &[f64]) -> Vec<f64> {
    let (d, r) = (form.dim, form.degree);
    let w = (form.value)(x);
    let dw = (form.derivative)(x);
    let gamma = metric.christoffel(x);
    let block = d.pow(r as u32);
    let tail = block / d;
    let mut out = vec![0.0; tail];
    let mut idx = vec![0usize; r];
    for flat in 0..block {
        let mut rem = flat;
        for s in (0..r).rev() {
            idx[s] = rem % d;
            rem /= d;
        }
        // (∇_j ω)_I = ∂_j ω_I − Σ_s Γ^l_{j i_s} ω_{I[s→l]}
        let mut nabla_v = 0.0;
        for j in 0..d {
            if v[j] == 0.0 {
                continue;
            }
            let mut t = dw[j * block + flat];
            for s in 0..r {
                let stride = d.pow((r - 1 - s) as u32);
                let base = flat - idx[s] * stride;
                for l in 0..d {
                    let g = gamma[(l * d + j) * d + idx[s]];
                    if g != 0.0 {
                        t -= g * w[base + l * stride];
                    }
                }
            }
            nabla_v += v[j] * t;
        }
        out[flat % tail] += v[idx[0]] * nabla_v;
    }
    out
}

/// Largest Euclidean norm of `(∇_v ω)(v, ·, …, ·)` over `samples` seeded
/// points and unit directions of the patch.
pub fn killing_form_residual(form: &FormField, metric: PatchMetric, samples: usize, seed: u64) -> Result<f64> {
    if !(1..=4).contains(&form.degree) || form.dim < form.degree {
        return Err(Error::InvalidInput(format!(
            "form of degree {} on ℝ^{} is outside the supported range",
            form.degree, form.dim
        )));
    }
    let d = form.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let gauss = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
            g.into_iter().map(|c| c / n).collect()
        };
        let dir = gauss(&mut rng);
        let radius = metric.sample_radius() * rng.random::<f64>().powf(1.0 / d as f64);
        let x: Vec<f64> = dir.iter().map(|c| c * radius).collect();
        let v = gauss(&mut rng);
        let t = contracted_derivative(form, metric, &x, &v);
        worst = worst.max(t.iter().map(|c| c * c).sum::<f64>().sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transitivity::models::g2_three_form;

    fn kahler(d: usize) -> Vec<f64> {
        let mut j = vec![0.0; d * d];
        for b in 0..d / 2 {
            j[(2 * b) * d + 2 * b + 1] = 1.0;
            j[(2 * b + 1) * d + 2 * b] = -1.0;
        }
        j
    }

    /// Rotation field `x₀∂₁ − x₁∂₀` lowered by the conformal factor `e^{2φ}`.
    fn rotation_one_form<'a>(metric: PatchMetric) -> FormField<'a> {
        let d = 3;
        let factor = move |x: &[f64]| -> (f64, Vec<f64>) {
            match metric {
                PatchMetric::Flat => (1.0, vec![0.0; d]),
                PatchMetric::PoincareBall => {
                    let r2: f64 = x.iter().map(|c| c * c).sum();
                    let f = 4.0 / (1.0 - r2).powi(2);
                    (f, x.iter().map(|c| f * 4.0 * c / (1.0 - r2)).collect())
                }
            }
        };
        let field = |x: &[f64]| vec![-x[1], x[0], 0.0];
        FormField {
            dim: d,
            degree: 1,
            value: Box::new(move |x| {
                let (f, _) = factor(x);
                field(x).into_iter().map(|c| f * c).collect()
            }),
            derivative: Box::new(move |x| {
                let (f, df) = factor(x);
                let a = field(x);
                // ∂_j (f a_i) = ∂_j f a_i + f ∂_j a_i
                let mut out = vec![0.0; d * d];
                for j in 0..d {
                    for i in 0..d {
                        out[j * d + i] = df[j] * a[i];
                    }
                }
                // ∂₀a₁ = 1 and ∂₁a₀ = −1
                out[1] = df[0] * a[1] + f;
                out[d] = df[1] * a[0] - f;
                out
            }),
        }
    }

    #[test]
    fn parallel_forms_are_killing() {
        let c = FormField::constant(3, 2, vec![0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(killing_form_residual(&c, PatchMetric::Flat, 50, 1).unwrap() < 1e-12);
        let j = FormField::constant(4, 2, kahler(4));
        assert!(killing_form_residual(&j, PatchMetric::Flat, 50, 2).unwrap() < 1e-12);
        let phi = FormField::constant(7, 3, g2_three_form());
        assert!(killing_form_residual(&phi, PatchMetric::Flat, 20, 3).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_fields_give_killing_one_forms() {
        for metric in [PatchMetric::Flat, PatchMetric::PoincareBall] {
            let w = rotation_one_form(metric);
            let r = killing_form_residual(&w, metric, 200, 4).unwrap();
            assert!(r < 1e-8, "{metric:?}: {r}");
        }
        // the flat rotation form is not Killing for the hyperbolic metric
        let w = rotation_one_form(PatchMetric::Flat);
        assert!(killing_form_residual(&w, PatchMetric::PoincareBall, 200, 4).unwrap() > 1e-3);
    }

    #[test]
    fn generic_two_form_is_not_killing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 4;
        let mut lin = vec![0.0; d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in (i + 1)..d {
                    let c: f64 = rng.random_range(-1.0..1.0);
                    lin[(k * d + i) * d + j] = c;
                    lin[(k * d + j) * d + i] = -c;
                }
            }
        }
        let lin2 = lin.clone();
        // ω_ij(x) = Σ_k x_k L_kij, ∂_k ω_ij = L_kij
        let w = FormField {
            dim: d,
            degree: 2,
            value: Box::new(move |x| {
                let mut out = vec![0.0; d * d];
                for k in 0..d {
                    for ij in 0..d * d {
                        out[ij] += x[k] * lin[k * d * d + ij];
                    }
                }
                out
            }),
            derivative: Box::new(move |_| lin2.clone()),
        };
        assert!(killing_form_residual(&w, PatchMetric::Flat, 100, 5).unwrap() > 1e-3);
    }

    #[test]
    fn unsupported_degree() {
        let w = FormField::constant(3, 0, vec![1.0]);
        assert!(killing_form_residual(&w, PatchMetric::Flat, 1, 0).is_err());
    }
}
