//! Physical configuration (ensembles, probe photons, coupling topology,
//! control fields) and construction of the time-dependent quadratic mode
//! Hamiltonian.
//!
//! In the large-N, low-excitation regime the collective optical excitation
//! A_σ and spin wave C_σ of each ensemble are bosonic modes, and the
//! interaction Hamiltonian is a quadratic form over the ordered mode basis
//! (photons, then optical modes, then spin waves). Couplings carry g·√N on
//! photon–optical pairs and Ω_σ(t) on optical–spin pairs; everything is at
//! resonance, so the diagonal is zero and total excitation number is
//! conserved.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::schedule::ControlSchedule;
use crate::C64;

/// One atomic ensemble: a label and its atom count N (enters only as √N).
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub id: String,
    /// Atom count; positive real, used only as a √N multiplier.
    pub atoms: f64,
}

/// A photon-mode ↔ ensemble coupling with vacuum coupling constant g.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingEdge {
    pub photon: String,
    pub ensemble: String,
    pub g: f64,
}

/// Full system description: ensembles, probe photon modes, the bipartite
/// coupling graph, and one control schedule per ensemble.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub ensembles: Vec<EnsembleSpec>,
    pub photons: Vec<String>,
    pub edges: Vec<CouplingEdge>,
    pub controls: BTreeMap<String, ControlSchedule>,
}

/// A single mode of the bosonized system, indexed into the config's lists.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// Probe photon mode `photons[i]`.
    Photon(usize),
    /// Collective optical excitation A_σ of `ensembles[i]`.
    Optical(usize),
    /// Collective spin wave C_σ of `ensembles[i]`.
    Spin(usize),
}

/// Deterministically ordered mode basis: all photons in config order, then
/// all optical modes, then all spin waves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeBasis {
    modes: Vec<Mode>,
    photon_count: usize,
    ensemble_count: usize,
}

impl ModeBasis {
    pub fn new(photon_count: usize, ensemble_count: usize) -> Self {
        let mut modes = Vec::with_capacity(photon_count + 2 * ensemble_count);
        modes.extend((0..photon_count).map(Mode::Photon));
        modes.extend((0..ensemble_count).map(Mode::Optical));
        modes.extend((0..ensemble_count).map(Mode::Spin));
        Self { modes, photon_count, ensemble_count }
    }

    pub fn len(&self) -> usize { self.modes.len() }

    pub fn is_empty(&self) -> bool { self.modes.is_empty() }

    pub fn modes(&self) -> &[Mode] { &self.modes }

    pub fn photon_count(&self) -> usize { self.photon_count }

    pub fn ensemble_count(&self) -> usize { self.ensemble_count }

    pub fn photon(&self, i: usize) -> usize { i }

    pub fn optical(&self, i: usize) -> usize { self.photon_count + i }

    pub fn spin(&self, i: usize) -> usize { self.photon_count + self.ensemble_count + i }

    pub fn index_of(&self, mode: Mode) -> usize {
        match mode {
            Mode::Photon(i) => self.photon(i),
            Mode::Optical(i) => self.optical(i),
            Mode::Spin(i) => self.spin(i),
        }
    }

    /// Human-readable label for CSV headers and reports.
    pub fn label(&self, idx: usize, config: &SystemConfig) -> String {
        match self.modes[idx] {
            Mode::Photon(i) => format!("photon:{}", config.photons[i]),
            Mode::Optical(i) => format!("optical:{}", config.ensembles[i].id),
            Mode::Spin(i) => format!("spin:{}", config.ensembles[i].id),
        }
    }
}

/// The quadratic mode Hamiltonian at a fixed time: Hermitian, zero diagonal,
/// nonzero only on coupled (photon, optical) and (optical, spin) pairs.
#[derive(Clone, Debug)]
pub struct ModeHamiltonian {
    pub h: DMatrix<C64>,
    pub t: f64,
    pub basis: ModeBasis,
}

impl ModeHamiltonian {
    pub fn dim(&self) -> usize { self.h.nrows() }

    /// Max |h − h†| entry; zero by construction.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.h[(i, j)] - self.h[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Spectral norm (max |eigenvalue|); the matrix is Hermitian.
    pub fn operator_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let eig = self.h.clone().symmetric_eigen();
        eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()))
    }

    /// ‖h·v‖₂ for a coefficient vector over the mode basis.
    pub fn apply_norm(&self, v: &[C64]) -> f64 {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match basis size");
        let mut acc = 0.0f64;
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                s += self.h[(i, j)] * v[j];
            }
            acc += s.norm_sqr();
        }
        acc.sqrt()
    }
}

/// Precomputed sparse layout of the Hamiltonian couplings, used by the
/// propagator's hot loop to rebuild h(t) without re-validating.
#[derive(Clone, Debug)]
pub(crate) struct CouplingLayout {
    pub dim: usize,
    /// (photon row, optical col, g·√N) — time independent.
    pub static_pairs: Vec<(usize, usize, f64)>,
    /// (optical row, spin col, ensemble index) — scaled by Ω_σ(t).
    pub control_pairs: Vec<(usize, usize, usize)>,
}

impl SystemConfig {
    pub fn ensemble_count(&self) -> usize { self.ensembles.len() }

    pub fn photon_count(&self) -> usize { self.photons.len() }

    pub fn basis(&self) -> ModeBasis {
        ModeBasis::new(self.photon_count(), self.ensemble_count())
    }

    pub fn ensemble_index(&self, id: &str) -> Option<usize> {
        self.ensembles.iter().position(|e| e.id == id)
    }

    pub fn photon_index(&self, id: &str) -> Option<usize> {
        self.photons.iter().position(|p| p == id)
    }

    /// g·√N for an edge, the effective photon–optical coupling rate.
    pub fn edge_rate(&self, edge: &CouplingEdge) -> f64 {
        let n = self
            .ensemble_index(&edge.ensemble)
            .map(|i| self.ensembles[i].atoms)
            .unwrap_or(f64::NAN);
        edge.g * n.sqrt()
    }

    /// The largest g·√N in the config; defines the rate unit of the model.
    /// Time and all frequencies are dimensionless in these units.
    pub fn rate_unit(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| self.edge_rate(e).abs())
            .fold(0.0f64, f64::max)
    }

    /// Control Rabi frequency Ω_σ(t) for ensemble index σ.
    pub fn omega_at(&self, ensemble_idx: usize, t: f64) -> Result<f64> {
        let id = &self.ensembles[ensemble_idx].id;
        let sched = self
            .controls
            .get(id)
            .ok_or_else(|| Error::InvalidConfig(format!("ensemble {id} has no control schedule")))?;
        sched.omega(t)
    }

    pub(crate) fn layout(&self) -> Result<CouplingLayout> {
        let violations = validate_config(self);
        if let Some(first) = violations.first() {
            return Err(Error::InvalidConfig(first.clone()));
        }
        let basis = self.basis();
        let mut static_pairs = Vec::with_capacity(self.edges.len());
        for edge in &self.edges {
            let p = self.photon_index(&edge.photon).unwrap();
            let e = self.ensemble_index(&edge.ensemble).unwrap();
            static_pairs.push((basis.photon(p), basis.optical(e), self.edge_rate(edge)));
        }
        let control_pairs = (0..self.ensemble_count())
            .map(|e| (basis.optical(e), basis.spin(e), e))
            .collect();
        Ok(CouplingLayout { dim: basis.len(), static_pairs, control_pairs })
    }

    /// Fill a preallocated row-major buffer with the (real symmetric)
    /// Hamiltonian at time `t`. Hot-loop path: no allocation, no validation.
    pub(crate) fn fill_real_hamiltonian(
        &self,
        layout: &CouplingLayout,
        t: f64,
        buf: &mut [f64],
    ) -> Result<()> {
        let n = layout.dim;
        debug_assert_eq!(buf.len(), n * n);
        buf.fill(0.0);
        for &(i, j, g) in &layout.static_pairs {
            buf[i * n + j] = g;
            buf[j * n + i] = g;
        }
        for &(i, j, e) in &layout.control_pairs {
            let w = self.omega_at(e, t)?;
            buf[i * n + j] = w;
            buf[j * n + i] = w;
        }
        Ok(())
    }
}

/// Check every config invariant and return a human-readable description of
/// each violation; an empty list means the config is well-formed.
pub fn validate_config(config: &SystemConfig) -> Vec<String> {
    let mut violations = Vec::new();

    let mut seen = BTreeSet::new();
    for e in &config.ensembles {
        if !seen.insert(e.id.as_str()) {
            violations.push(format!("duplicate ensemble id {:?}", e.id));
        }
        if !(e.atoms > 0.0) || !e.atoms.is_finite() {
            violations.push(format!("ensemble {:?} has non-positive atom count {}", e.id, e.atoms));
        }
    }
    let mut seen = BTreeSet::new();
    for p in &config.photons {
        if !seen.insert(p.as_str()) {
            violations.push(format!("duplicate photon id {p:?}"));
        }
    }

    let mut pairs = BTreeSet::new();
    for edge in &config.edges {
        if config.photon_index(&edge.photon).is_none() {
            violations.push(format!("edge references unknown photon {:?}", edge.photon));
        }
        if config.ensemble_index(&edge.ensemble).is_none() {
            violations.push(format!("edge references unknown ensemble {:?}", edge.ensemble));
        }
        if !edge.g.is_finite() {
            violations.push(format!(
                "edge ({:?}, {:?}) has non-finite coupling {}",
                edge.photon, edge.ensemble, edge.g
            ));
        }
        if !pairs.insert((edge.photon.as_str(), edge.ensemble.as_str())) {
            violations.push(format!("duplicate edge ({:?}, {:?})", edge.photon, edge.ensemble));
        }
    }

    for e in &config.ensembles {
        match config.controls.get(&e.id) {
            None => violations.push(format!("ensemble {:?} has no control schedule", e.id)),
            Some(sched) => {
                for v in sched.validate() {
                    violations.push(format!("control schedule for {:?}: {v}", e.id));
                }
            }
        }
    }
    for id in config.controls.keys() {
        if config.ensemble_index(id).is_none() {
            violations.push(format!("control schedule for unknown ensemble {id:?}"));
        }
    }

    // Ratio groups must be structurally ratio-locked.
    let mut groups: BTreeMap<&str, Vec<&ControlSchedule>> = BTreeMap::new();
    for sched in config.controls.values() {
        if let Some(group) = sched.ratio_group() {
            groups.entry(group).or_default().push(sched);
        }
    }
    for (group, members) in groups {
        if members.len() < 2 {
            continue;
        }
        let head = members[0];
        for other in &members[1..] {
            if let Some(v) = head.ratio_lock_violation(other) {
                violations.push(format!("ratio group {group:?}: {v}"));
            }
        }
    }

    violations
}

/// Build the mode Hamiltonian at time `t`. Only the upper triangle is
/// constructed; the lower triangle is its mirror, so h = h† exactly.
pub fn build_hamiltonian(config: &SystemConfig, t: f64) -> Result<ModeHamiltonian> {
    let layout = config.layout()?;
    let n = layout.dim;
    let mut h = DMatrix::<C64>::zeros(n, n);
    for &(i, j, g) in &layout.static_pairs {
        h[(i, j)] = C64::new(g, 0.0);
        h[(j, i)] = C64::new(g, 0.0);
    }
    for &(i, j, e) in &layout.control_pairs {
        let w = config.omega_at(e, t)?;
        h[(i, j)] = C64::new(w, 0.0);
        h[(j, i)] = C64::new(w, 0.0);
    }
    Ok(ModeHamiltonian { h, t, basis: config.basis() })
}

/// Roles of a straight-line topology: one photon coupled to every ensemble.
#[derive(Clone, Debug)]
pub struct LineRoles {
    /// Photon index (always 0: a single probe mode).
    pub photon: usize,
    /// Effective couplings g_σ√N_σ in ensemble (config) order.
    pub rates: Vec<f64>,
}

/// Classify a config as straight-line, or explain why it is not.
pub fn straight_line_roles(config: &SystemConfig) -> Result<LineRoles> {
    if config.photon_count() != 1 {
        return Err(Error::NotStraightLine(format!(
            "expected exactly one photon mode, found {}",
            config.photon_count()
        )));
    }
    let m = config.ensemble_count();
    if config.edges.len() != m {
        return Err(Error::NotStraightLine(format!(
            "expected {} edges (photon coupled to every ensemble), found {}",
            m,
            config.edges.len()
        )));
    }
    let mut rates = vec![None; m];
    for edge in &config.edges {
        let e = config
            .ensemble_index(&edge.ensemble)
            .ok_or_else(|| Error::NotStraightLine(format!("unknown ensemble {:?}", edge.ensemble)))?;
        rates[e] = Some(config.edge_rate(edge));
    }
    let rates = rates
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| {
                Error::NotStraightLine(format!(
                    "ensemble {:?} not coupled to the probe",
                    config.ensembles[i].id
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LineRoles { photon: 0, rates })
}

/// Roles of the cross-line topology: photon 1 → {shared, second}, photon 2 →
/// {shared, third}. Field names follow the coupling's position in the graph.
#[derive(Clone, Debug)]
pub struct CrossRoles {
    pub photon1: usize,
    pub photon2: usize,
    /// Ensemble coupled to both probes.
    pub shared: usize,
    /// Ensemble coupled only to photon 1.
    pub second: usize,
    /// Ensemble coupled only to photon 2.
    pub third: usize,
    /// g₁√N for (photon1, shared).
    pub rate_p1_shared: f64,
    /// g′₁√N for (photon1, second).
    pub rate_p1_second: f64,
    /// g₂√N for (photon2, shared).
    pub rate_p2_shared: f64,
    /// g′₂√N for (photon2, third).
    pub rate_p2_third: f64,
}

/// Classify a config as cross-line, or explain why it is not.
pub fn cross_line_roles(config: &SystemConfig) -> Result<CrossRoles> {
    if config.photon_count() != 2 || config.ensemble_count() != 3 {
        return Err(Error::NotCrossLine(format!(
            "expected 2 photons and 3 ensembles, found {} and {}",
            config.photon_count(),
            config.ensemble_count()
        )));
    }
    if config.edges.len() != 4 {
        return Err(Error::NotCrossLine(format!("expected 4 edges, found {}", config.edges.len())));
    }
    let mut per_photon: [Vec<(usize, f64)>; 2] = [Vec::new(), Vec::new()];
    for edge in &config.edges {
        let p = config
            .photon_index(&edge.photon)
            .ok_or_else(|| Error::NotCrossLine(format!("unknown photon {:?}", edge.photon)))?;
        let e = config
            .ensemble_index(&edge.ensemble)
            .ok_or_else(|| Error::NotCrossLine(format!("unknown ensemble {:?}", edge.ensemble)))?;
        per_photon[p].push((e, config.edge_rate(edge)));
    }
    if per_photon[0].len() != 2 || per_photon[1].len() != 2 {
        return Err(Error::NotCrossLine("each probe must couple exactly two ensembles".into()));
    }
    let set1: BTreeSet<usize> = per_photon[0].iter().map(|&(e, _)| e).collect();
    let set2: BTreeSet<usize> = per_photon[1].iter().map(|&(e, _)| e).collect();
    let shared: Vec<usize> = set1.intersection(&set2).copied().collect();
    if shared.len() != 1 {
        return Err(Error::NotCrossLine(format!(
            "probes must share exactly one ensemble, share {}",
            shared.len()
        )));
    }
    let shared = shared[0];
    let second = per_photon[0].iter().find(|&&(e, _)| e != shared).unwrap().0;
    let third = per_photon[1].iter().find(|&&(e, _)| e != shared).unwrap().0;
    if second == third {
        return Err(Error::NotCrossLine("outer ensembles must be distinct".into()));
    }
    let rate = |p: usize, e: usize| per_photon[p].iter().find(|&&(k, _)| k == e).unwrap().1;
    Ok(CrossRoles {
        photon1: 0,
        photon2: 1,
        shared,
        second,
        third,
        rate_p1_shared: rate(0, shared),
        rate_p1_second: rate(0, second),
        rate_p2_shared: rate(1, shared),
        rate_p2_third: rate(1, third),
    })
}
