//! Test functions: smooth continuum profiles transported to every lattice by
//! `d_h`, and lattice-level stress functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{LnlsError, Result};
use crate::lattice::{discretize, ContinuumSampler, FnSampler, GridFunction, Lattice};
use crate::spectral::fft_nd;

/// A continuum initial datum, as it appears in study configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// `Π_j Σ_n A·exp(-(x_j - c_j + 2πn)²/(2w²))`.
    WrappedGaussian { width: f64, amplitude: f64, center: Vec<f64> },
    /// Up to 8 distinct modes with `|k_j| ≤ kmax`, coefficients drawn from a seeded
    /// ChaCha stream, normalised to `‖f‖_{H¹} = 1`.
    LowModes { modes: usize, kmax: i64, seed: u64 },
    /// `A·e^{ik·x}`.
    PlaneWave { k: Vec<i64>, amplitude: f64 },
    Constant { re: f64, im: f64 },
}

impl ProfileSpec {
    pub fn gaussian() -> Self {
        ProfileSpec::WrappedGaussian { width: 0.6, amplitude: 1.0, center: vec![0.0, 0.0] }
    }

    pub fn low_modes(seed: u64) -> Self {
        ProfileSpec::LowModes { modes: 8, kmax: 4, seed }
    }

    pub fn name(&self) -> String {
        match self {
            ProfileSpec::WrappedGaussian { width, .. } => format!("gaussian(w={width})"),
            ProfileSpec::LowModes { seed, .. } => format!("low_modes(seed={seed})"),
            ProfileSpec::PlaneWave { k, .. } => format!("plane_wave(k={k:?})"),
            ProfileSpec::Constant { .. } => "constant".to_string(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ProfileSpec::WrappedGaussian { width, center, .. } => {
                if !(*width > 0.0 && *width <= 2.0) {
                    return Err(LnlsError::domain(format!("gaussian width must lie in (0, 2], got {width}")));
                }
                if center.len() < dim {
                    return Err(LnlsError::domain(format!("gaussian center needs {dim} coordinates")));
                }
            }
            ProfileSpec::LowModes { modes, kmax, .. } => {
                let available = (2 * kmax + 1).pow(dim as u32);
                if *modes == 0 || *modes > 8 || *kmax < 1 || (*modes as i64) > available {
                    return Err(LnlsError::domain(format!(
                        "low_modes needs 1 ≤ modes ≤ 8 distinct frequencies with kmax ≥ 1, got modes = {modes}, kmax = {kmax}"
                    )));
                }
            }
            ProfileSpec::PlaneWave { k, .. } => {
                if k.len() < dim {
                    return Err(LnlsError::domain(format!("plane wave needs {dim} frequency components")));
                }
            }
            ProfileSpec::Constant { .. } => {}
        }
        Ok(())
    }

    /// The profile as a sampler on `T^dim`.
    pub fn build(&self, dim: usize) -> Result<Arc<dyn ContinuumSampler>> {
        self.validate(dim)?;
        let tag = self.name();
        Ok(match self.clone() {
            ProfileSpec::WrappedGaussian { width, amplitude, center } => {
                Arc::new(FnSampler::new(dim, tag, move |x: &[f64]| {
                    let mut v = amplitude;
                    for (xj, cj) in x.iter().zip(&center) {
                        let s: f64 = (-2..=2)
                            .map(|n| (-(xj - cj + 2.0 * PI * n as f64).powi(2) / (2.0 * width * width)).exp())
                            .sum();
                        v *= s;
                    }
                    Complex64::new(v, 0.0)
                }))
            }
            ProfileSpec::LowModes { modes, kmax, seed } => {
                let terms = draw_modes(dim, modes, kmax, seed);
                Arc::new(FnSampler::new(dim, tag, move |x: &[f64]| {
                    terms
                        .iter()
                        .map(|(k, c)| {
                            let ph: f64 = k.iter().zip(x).map(|(kj, xj)| *kj as f64 * xj).sum();
                            c * Complex64::from_polar(1.0, ph)
                        })
                        .sum()
                }))
            }
            ProfileSpec::PlaneWave { k, amplitude } => Arc::new(FnSampler::new(dim, tag, move |x: &[f64]| {
                let ph: f64 = k.iter().zip(x).map(|(kj, xj)| *kj as f64 * xj).sum();
                Complex64::from_polar(amplitude, ph)
            })),
            ProfileSpec::Constant { re, im } => {
                Arc::new(FnSampler::new(dim, tag, move |_: &[f64]| Complex64::new(re, im)))
            }
        })
    }
}

fn draw_modes(dim: usize, modes: usize, kmax: i64, seed: u64) -> Vec<(Vec<i64>, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms: Vec<(Vec<i64>, Complex64)> = Vec::with_capacity(modes);
    while terms.len() < modes {
        let k: Vec<i64> = (0..dim).map(|_| rng.gen_range(-kmax..=kmax)).collect();
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if terms.iter().all(|(kk, _)| *kk != k) {
            terms.push((k, c));
        }
    }
    // ‖f‖²_{H¹} = (2π)^d Σ ⟨k⟩² |c_k|²
    let h1: f64 = terms
        .iter()
        .map(|(k, c)| (1.0 + k.iter().map(|kj| (kj * kj) as f64).sum::<f64>()) * c.norm_sqr())
        .sum::<f64>()
        * (2.0 * PI).powi(dim as i32);
    let scale = 1.0 / h1.sqrt();
    terms.into_iter().map(|(k, c)| (k, c * scale)).collect()
}

/// The smooth corpus: wrapped Gaussian, two random low-mode sums and a plane wave.
pub fn smooth_corpus(seed: u64) -> Vec<ProfileSpec> {
    vec![
        ProfileSpec::gaussian(),
        ProfileSpec::low_modes(seed),
        ProfileSpec::low_modes(seed.wrapping_add(1)),
        ProfileSpec::PlaneWave { k: vec![1, 2], amplitude: 1.0 },
    ]
}

/// `(tag, d_h f)` for every profile of `specs` on `lat`.
pub fn discretize_corpus(specs: &[ProfileSpec], lat: &Lattice) -> Result<Vec<(String, GridFunction)>> {
    specs
        .iter()
        .map(|s| Ok((s.name(), discretize(s.build(lat.dim())?.as_ref(), *lat))))
        .collect()
}

/// A Gaussian wave packet on the lattice centred at frequency `⌊3M/4⌋` in every axis.
pub fn top_frequency_packet(lat: &Lattice) -> GridFunction {
    let k = (3 * lat.half_size() / 4) as f64;
    GridFunction::from_fn(*lat, |x| {
        let r2: f64 = x.iter().map(|xj| xj * xj).sum();
        let ph: f64 = x.iter().map(|xj| k * xj).sum();
        Complex64::from_polar((-2.0 * r2).exp(), ph)
    })
}

/// The smooth corpus on `lat` plus the top-frequency packet.
pub fn stress_corpus(lat: &Lattice, seed: u64) -> Result<Vec<(String, GridFunction)>> {
    let mut out = discretize_corpus(&smooth_corpus(seed), lat)?;
    out.push(("top_frequency_packet".to_string(), top_frequency_packet(lat)));
    Ok(out)
}

/// `‖f‖_{H^s(T^d)} = ((2π)^d Σ_k ⟨k⟩^{2s} |c_k|²)^{1/2}` from the FFT of `n^d` point samples.
///
/// Accurate when `f` is resolved by `n` points per axis.
pub fn continuum_sobolev_norm(f: &dyn ContinuumSampler, s: f64, n: usize) -> f64 {
    let d = f.dim();
    let offset = [0.0, 0.0];
    let mut buf = f.sample_grid(n, &offset[..d]);
    fft_nd(&mut buf, n, d, FftDirection::Forward);
    let inv = 1.0 / buf.len() as f64;
    let signed = |b: usize| -> f64 {
        let b = b as i64;
        let n = n as i64;
        (if b < n / 2 { b } else { b - n }) as f64
    };
    let mut sum = 0.0;
    for (b, c) in buf.iter().enumerate() {
        let k2 = match d {
            1 => signed(b).powi(2),
            _ => signed(b / n).powi(2) + signed(b % n).powi(2),
        };
        sum += (1.0 + k2).powf(s) * (c * inv).norm_sqr();
    }
    ((2.0 * PI).powi(d as i32) * sum).sqrt()
}
