//! Dark-state-polariton analysis: mixing angles, closed-form DSP coefficient
//! vectors, and numerical dark subspaces.
//!
//! A dark mode is a normalized mode-space vector annihilated by the quadratic
//! Hamiltonian: h·v = 0 with no optical component. For the straight-line
//! topology the dark mode is unique (for Ω > 0) and parameterized by the
//! mixing angles θ, φ₁…φ_{m−1}; the spin weights go as g_σ√N_σ/Ω_σ. The
//! cross-line topology carries two dark modes, one per probe, which are
//! generally *not* orthogonal: their overlap is sinθ₁sinθ₂cosφ₁cosφ₂, so a
//! summed operator does not obey a bosonic commutation relation. We expose
//! the two vectors and their Gram data rather than pretending otherwise, and
//! `dark_subspace` yields an orthonormalized basis when one is needed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::system::{
    cross_line_roles, straight_line_roles, ModeBasis, ModeHamiltonian, SystemConfig,
};
use crate::C64;

/// Default relative threshold for numerical null-space membership.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Mixing angles of the straight-line dark mode.
///
/// θ ∈ [0, π/2] sets photon vs atomic character (tan θ = √Σ(g_σ√N_σ/Ω_σ)²);
/// the m−1 angles φⱼ partition the stored excitation among ensembles.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: Vec<f64>,
}

impl MixingAngles {
    /// Number of ensembles this angle set describes.
    pub fn ensemble_count(&self) -> usize {
        self.phi.len() + 1
    }
}

/// Unit coefficient vector of a dark-state polariton over a mode basis.
/// Support on photon and spin entries only; h·v = 0 for the Hamiltonian it
/// was built from.
#[derive(Clone, Debug)]
pub struct DspVector {
    pub v: Vec<C64>,
    pub basis: ModeBasis,
}

impl DspVector {
    pub fn norm(&self) -> f64 {
        self.v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self, other⟩ with the conjugate on `self`.
    pub fn inner(&self, other: &DspVector) -> C64 {
        self.v.iter().zip(&other.v).map(|(a, b)| a.conj() * b).sum()
    }

    /// ℓ₂ norm of the photon block.
    pub fn photon_norm(&self) -> f64 {
        let np = self.basis.photon_count();
        self.v[..np].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max |entry| over the optical block; zero for a true dark mode.
    pub fn optical_residual(&self) -> f64 {
        let (np, ne) = (self.basis.photon_count(), self.basis.ensemble_count());
        self.v[np..np + ne].iter().map(C64::norm).fold(0.0, f64::max)
    }
}

fn spin_ratios(config: &SystemConfig, t: f64) -> Result<Vec<f64>> {
    let roles = straight_line_roles(config)?;
    let m = config.ensemble_count();
    let mut ratios = Vec::with_capacity(m);
    for (e, &rate) in roles.rates.iter().enumerate() {
        let w = config.omega_at(e, t)?;
        if w <= 0.0 {
            return Err(Error::DegenerateAngles {
                t,
                detail: format!(
                    "Ω = {w} for ensemble {:?}; mixing angles need all Ω > 0",
                    config.ensembles[e].id
                ),
            });
        }
        ratios.push(rate / w);
    }
    Ok(ratios)
}

/// Mixing angles of a straight-line config at time `t`.
///
/// Requires all Ω_σ(t) > 0 (otherwise the angles degenerate; use
/// [`dark_subspace`] instead). With R_σ = g_σ√N_σ/Ω_σ(t):
/// θ = atan‖R‖ and φ_k = atan2(R_{k+1}, ‖(R_1…R_k)‖).
pub fn mixing_angles(config: &SystemConfig, t: f64) -> Result<MixingAngles> {
    let ratios = spin_ratios(config, t)?;
    Ok(angles_from_ratios(&ratios))
}

/// Angle set from the spin-weight ratios R_σ = g_σ√N_σ/Ω_σ.
pub fn angles_from_ratios(ratios: &[f64]) -> MixingAngles {
    let m = ratios.len();
    let norm_all = ratios.iter().map(|r| r * r).sum::<f64>().sqrt();
    let theta = norm_all.atan();
    let mut phi = Vec::with_capacity(m.saturating_sub(1));
    let mut partial = ratios[0] * ratios[0];
    for &r in &ratios[1..] {
        phi.push(f64::atan2(r, partial.sqrt()));
        partial += r * r;
    }
    MixingAngles { theta, phi }
}

/// Closed-form straight-line DSP vector from its mixing angles:
/// photon entry cos θ; spin k entry −sin θ·sin φ_{k−1}·Π_{j≥k} cos φⱼ
/// (with the first spin taking the full cosine product). Unit norm.
pub fn dsp_vector_line(angles: &MixingAngles) -> DspVector {
    let m = angles.ensemble_count();
    let basis = ModeBasis::new(1, m);
    let mut v = vec![C64::new(0.0, 0.0); basis.len()];
    let (sin_t, cos_t) = angles.theta.sin_cos();
    v[basis.photon(0)] = C64::new(cos_t, 0.0);
    // suffix products Π_{j=k}^{m-1} cos φ_j, 1-indexed in k
    let mut suffix = vec![1.0; m + 1];
    for k in (1..m).rev() {
        suffix[k] = suffix[k + 1] * angles.phi[k - 1].cos();
    }
    v[basis.spin(0)] = C64::new(-sin_t * suffix[1], 0.0);
    for k in 2..=m {
        let w = angles.phi[k - 2].sin() * suffix[k];
        v[basis.spin(k - 1)] = C64::new(-sin_t * w, 0.0);
    }
    DspVector { v, basis }
}

/// Mixing angles of the two cross-line dark modes.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossAngles {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

impl CrossAngles {
    /// ⟨d₁, d₂⟩ predicted by the closed form (both share the first spin).
    pub fn overlap(&self) -> f64 {
        self.theta1.sin() * self.theta2.sin() * self.phi1.cos() * self.phi2.cos()
    }
}

/// Cross-line mixing angles at time `t`:
/// tan φ₁ = g′₁√N₂·Ω₁/(g₁√N₁·Ω₂), tan φ₂ = g′₂√N₃·Ω₁/(g₂√N₁·Ω₃),
/// tan θᵢ the corresponding chain norms.
pub fn cross_mixing_angles(config: &SystemConfig, t: f64) -> Result<CrossAngles> {
    let roles = cross_line_roles(config)?;
    let mut omega = |e: usize| -> Result<f64> {
        let w = config.omega_at(e, t)?;
        if w <= 0.0 {
            return Err(Error::DegenerateAngles {
                t,
                detail: format!(
                    "Ω = {w} for ensemble {:?}; cross-line angles need all Ω > 0",
                    config.ensembles[e].id
                ),
            });
        }
        Ok(w)
    };
    let w_shared = omega(roles.shared)?;
    let w_second = omega(roles.second)?;
    let w_third = omega(roles.third)?;
    let r1 = roles.rate_p1_shared / w_shared;
    let r1p = roles.rate_p1_second / w_second;
    let r2 = roles.rate_p2_shared / w_shared;
    let r2p = roles.rate_p2_third / w_third;
    Ok(CrossAngles {
        theta1: (r1 * r1 + r1p * r1p).sqrt().atan(),
        phi1: f64::atan2(r1p, r1),
        theta2: (r2 * r2 + r2p * r2p).sqrt().atan(),
        phi2: f64::atan2(r2p, r2),
    })
}

/// The two closed-form cross-line DSP vectors (d₁, d₂) at time `t`.
///
/// Each satisfies h·v = 0 and ‖v‖ = 1 individually. They are generally not
/// orthogonal: both contain the shared spin wave, with overlap
/// sinθ₁sinθ₂cosφ₁cosφ₂, so callers needing an orthonormal dark basis
/// should use [`dark_subspace`].
pub fn dsp_vectors_cross(config: &SystemConfig, t: f64) -> Result<(DspVector, DspVector)> {
    let roles = cross_line_roles(config)?;
    let angles = cross_mixing_angles(config, t)?;
    let basis = config.basis();
    let zero = C64::new(0.0, 0.0);

    let mut v1 = vec![zero; basis.len()];
    let (s1, c1) = angles.theta1.sin_cos();
    v1[basis.photon(roles.photon1)] = C64::new(c1, 0.0);
    v1[basis.spin(roles.shared)] = C64::new(-s1 * angles.phi1.cos(), 0.0);
    v1[basis.spin(roles.second)] = C64::new(-s1 * angles.phi1.sin(), 0.0);

    let mut v2 = vec![zero; basis.len()];
    let (s2, c2) = angles.theta2.sin_cos();
    v2[basis.photon(roles.photon2)] = C64::new(c2, 0.0);
    v2[basis.spin(roles.shared)] = C64::new(-s2 * angles.phi2.cos(), 0.0);
    v2[basis.spin(roles.third)] = C64::new(-s2 * angles.phi2.sin(), 0.0);

    Ok((DspVector { v: v1, basis: basis.clone() }, DspVector { v: v2, basis }))
}

/// Orthonormal basis of the numerical null space {v : ‖h·v‖ ≤ tol·‖h‖}.
///
/// Vectors are ordered by descending photon-block norm, ties broken by the
/// index of the first significant entry; each is gauged so its largest
/// entry is real positive. For an all-zero h the whole basis is returned.
pub fn dark_subspace(mh: &ModeHamiltonian, tol: f64) -> Vec<DspVector> {
    let n = mh.dim();
    let eig = mh.h.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let idx: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= tol * scale).collect();
    if idx.is_empty() {
        return Vec::new();
    }
    // Re-orthonormalize: eigenvectors of a degenerate cluster may mix.
    let mut cols: Vec<DVector<C64>> = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    for i in 0..cols.len() {
        for j in 0..i {
            let proj: C64 = cols[j].dotc(&cols[i]);
            let prev = cols[j].clone();
            cols[i] -= prev * proj;
        }
        let norm = cols[i].norm();
        let ci = cols[i].clone();
        cols[i] = ci / C64::new(norm, 0.0);
    }
    let mut out: Vec<DspVector> = cols
        .into_iter()
        .map(|c| {
            let mut v: Vec<C64> = c.iter().copied().collect();
            // deterministic gauge: largest-|entry| component real positive
            let (k, _) = v
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
                .unwrap();
            let phase = v[k] / C64::new(v[k].norm(), 0.0);
            if v[k].norm() > 0.0 {
                for c in v.iter_mut() {
                    *c /= phase;
                }
            }
            DspVector { v, basis: mh.basis.clone() }
        })
        .collect();
    out.sort_by(|a, b| {
        let pa = a.photon_norm();
        let pb = b.photon_norm();
        pb.partial_cmp(&pa).unwrap().then_with(|| {
            let fa = a.v.iter().position(|c| c.norm() > 1e-8).unwrap_or(usize::MAX);
            let fb = b.v.iter().position(|c| c.norm() > 1e-8).unwrap_or(usize::MAX);
            fa.cmp(&fb)
        })
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ControlSchedule;
    use crate::system::{build_hamiltonian, CouplingEdge, EnsembleSpec};
    use std::collections::BTreeMap;
    use std::f64::consts::FRAC_PI_2;

    pub(crate) fn line_config(rates: &[f64], omegas: &[f64]) -> SystemConfig {
        let ensembles: Vec<EnsembleSpec> = rates
            .iter()
            .enumerate()
            .map(|(i, _)| EnsembleSpec { id: format!("E{}", i + 1), atoms: 1.0 })
            .collect();
        let edges = rates
            .iter()
            .enumerate()
            .map(|(i, &g)| CouplingEdge { photon: "P1".into(), ensemble: format!("E{}", i + 1), g })
            .collect();
        let controls: BTreeMap<_, _> = omegas
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("E{}", i + 1), ControlSchedule::constant(w)))
            .collect();
        SystemConfig { ensembles, photons: vec!["P1".into()], edges, controls }
    }

    #[test]
    fn single_ensemble_theta_is_quarter_pi() {
        let config = line_config(&[1.0], &[1.0]);
        let angles = mixing_angles(&config, 0.0).unwrap();
        assert!((angles.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(angles.phi.is_empty());
    }

    #[test]
    fn equal_rates_and_controls_give_quarter_pi_phi() {
        let config = line_config(&[0.8, 0.8], &[1.3, 1.3]);
        let angles = mixing_angles(&config, 0.0).unwrap();
        assert!((angles.phi[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn theta_approaches_half_pi_as_controls_vanish() {
        let config = line_config(&[1.0, 1.0], &[1e-9, 1e-9]);
        let angles = mixing_angles(&config, 0.0).unwrap();
        assert!(FRAC_PI_2 - angles.theta < 2e-9);
    }

    #[test]
    fn zero_control_is_a_degenerate_angle_error() {
        let config = line_config(&[1.0, 1.0], &[1.0, 0.0]);
        match mixing_angles(&config, 0.0) {
            Err(Error::DegenerateAngles { detail, .. }) => {
                assert!(detail.contains("dark_subspace") || detail.contains("E2"));
            }
            other => panic!("expected degenerate-angle error, got {other:?}"),
        }
    }

    #[test]
    fn dsp_line_closed_forms() {
        // θ=0: pure photon
        let v = dsp_vector_line(&MixingAngles { theta: 0.0, phi: vec![0.3] });
        assert_eq!(v.v[0], C64::new(1.0, 0.0));
        assert!(v.v[1..].iter().all(|c| c.norm() == 0.0));

        // m=2, θ=π/2, φ=π/4: spins both −1/√2
        let v = dsp_vector_line(&MixingAngles {
            theta: FRAC_PI_2,
            phi: vec![std::f64::consts::FRAC_PI_4],
        });
        let b = v.basis.clone();
        assert!(v.v[b.photon(0)].norm() < 1e-16);
        let w = -1.0 / 2.0f64.sqrt();
        assert!((v.v[b.spin(0)].re - w).abs() < 1e-15);
        assert!((v.v[b.spin(1)].re - w).abs() < 1e-15);

        // m=3, θ=π/2, φ₁=π/4, φ₂=atan(√2/2): all spins −1/√3
        let v = dsp_vector_line(&MixingAngles {
            theta: FRAC_PI_2,
            phi: vec![std::f64::consts::FRAC_PI_4, (2.0f64.sqrt() / 2.0).atan()],
        });
        let b = v.basis.clone();
        let w = -1.0 / 3.0f64.sqrt();
        for e in 0..3 {
            assert!((v.v[b.spin(e)].re - w).abs() < 1e-15, "spin {e}: {:?}", v.v[b.spin(e)]);
        }
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_dsp_is_a_null_vector() {
        let config = line_config(&[1.0, 0.6, 0.9], &[0.7, 1.4, 0.5]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        let v = dsp_vector_line(&mixing_angles(&config, 0.0).unwrap());
        assert!(mh.apply_norm(&v.v) <= 1e-12 * mh.operator_norm());
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(v.optical_residual(), 0.0);
    }

    pub(crate) fn cross_config(rates: [f64; 4], omegas: [f64; 3]) -> SystemConfig {
        let ensembles = (1..=3)
            .map(|i| EnsembleSpec { id: format!("E{i}"), atoms: 1.0 })
            .collect();
        let edges = vec![
            CouplingEdge { photon: "P1".into(), ensemble: "E1".into(), g: rates[0] },
            CouplingEdge { photon: "P1".into(), ensemble: "E2".into(), g: rates[1] },
            CouplingEdge { photon: "P2".into(), ensemble: "E1".into(), g: rates[2] },
            CouplingEdge { photon: "P2".into(), ensemble: "E3".into(), g: rates[3] },
        ];
        let controls = (1..=3)
            .map(|i| (format!("E{i}"), ControlSchedule::constant(omegas[i - 1])))
            .collect();
        SystemConfig { ensembles, photons: vec!["P1".into(), "P2".into()], edges, controls }
    }

    #[test]
    fn cross_dsp_vectors_are_null_and_overlap_matches() {
        let config = cross_config([1.0, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        let (d1, d2) = dsp_vectors_cross(&config, 0.0).unwrap();
        let hnorm = mh.operator_norm();
        assert!(mh.apply_norm(&d1.v) <= 1e-12 * hnorm);
        assert!(mh.apply_norm(&d2.v) <= 1e-12 * hnorm);
        assert!((d1.norm() - 1.0).abs() < 1e-12);
        assert!((d2.norm() - 1.0).abs() < 1e-12);
        let angles = cross_mixing_angles(&config, 0.0).unwrap();
        let overlap = d1.inner(&d2);
        assert!((overlap.re - angles.overlap()).abs() < 1e-12);
        assert!(overlap.im.abs() < 1e-15);
    }

    #[test]
    fn cross_controls_dominating_gives_pure_photons() {
        let config = cross_config([1.0, 1.0, 1.0, 1.0], [1e9, 1e9, 1e9]);
        let (d1, d2) = dsp_vectors_cross(&config, 0.0).unwrap();
        assert!((d1.v[0].re - 1.0).abs() < 1e-15);
        assert!((d2.v[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dark_subspace_dimensions() {
        // straight line, generic: nullity 1, spanning the closed form
        let config = line_config(&[1.0, 0.6], &[0.7, 1.4]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        let basis_vecs = dark_subspace(&mh, DEFAULT_NULL_TOL);
        assert_eq!(basis_vecs.len(), 1);
        let closed = dsp_vector_line(&mixing_angles(&config, 0.0).unwrap());
        let overlap = basis_vecs[0].inner(&closed).norm();
        assert!((overlap - 1.0).abs() < 1e-10, "span must equal the closed form, overlap {overlap}");

        // controls off: nullity 2m−1 = 3
        let config = line_config(&[1.0, 1.0], &[0.0, 0.0]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        assert_eq!(dark_subspace(&mh, DEFAULT_NULL_TOL).len(), 3);

        // cross line, generic: nullity 2 containing both closed forms
        let config = cross_config([1.0, 0.8, 0.9, 0.7], [1.1, 0.6, 1.3]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        let basis_vecs = dark_subspace(&mh, DEFAULT_NULL_TOL);
        assert_eq!(basis_vecs.len(), 2);
        let (d1, d2) = dsp_vectors_cross(&config, 0.0).unwrap();
        for d in [&d1, &d2] {
            let p: f64 = basis_vecs.iter().map(|b| b.inner(d).norm_sqr()).sum();
            assert!((p - 1.0).abs() < 1e-10, "closed form must lie in the span, got {p}");
        }
    }

    #[test]
    fn dark_subspace_dimension_stable_under_tol() {
        let config = line_config(&[1.0, 0.6, 1.3], &[0.7, 1.4, 0.9]);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        for tol in [1e-11, 1e-10, 1e-9] {
            assert_eq!(dark_subspace(&mh, tol).len(), 1);
        }
    }

    /// The adopted partition-angle form (first power of g_m√N_m) produces a
    /// null vector; the same formula with a squared coupling in the numerator
    /// does not. Regression for the corrected closed form.
    #[test]
    fn squared_coupling_variant_is_not_null() {
        let rates = [0.9, 0.7, 2.0];
        let omegas = [1.1, 0.8, 1.3];
        let config = line_config(&rates, &omegas);
        let mh = build_hamiltonian(&config, 0.0).unwrap();
        let hnorm = mh.operator_norm();

        let adopted = mixing_angles(&config, 0.0).unwrap();
        assert!(mh.apply_norm(&dsp_vector_line(&adopted).v) <= 1e-12 * hnorm);

        // same angles except the last φ built with g² in the numerator
        let num = rates[2] * rates[2] * omegas[0] * omegas[1];
        let den = (rates[0] * rates[0] * omegas[1] * omegas[1] * omegas[2] * omegas[2]
            + rates[1] * rates[1] * omegas[0] * omegas[0] * omegas[2] * omegas[2])
            .sqrt();
        let mut literal = adopted.clone();
        *literal.phi.last_mut().unwrap() = f64::atan2(num, den);
        let residual = mh.apply_norm(&dsp_vector_line(&literal).v);
        assert!(residual > 1e-3 * hnorm, "squared variant unexpectedly near-null: {residual}");
    }
}
