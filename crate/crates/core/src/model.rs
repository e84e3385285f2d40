//! States and Hamiltonians of the two-cavity scheme.
//!
//! Two descriptions are provided. The effective exchange model couples the
//! flying atom to one ion at a time through
//! `lambda (sigma_+^f sigma_-^ion + sigma_-^f sigma_+^ion)`; it drives the
//! protocol. The full single-cavity model keeps the field mode, the ion's
//! vibrational mode and the `cos[eta (a + a^dagger)]` motional factor on
//! truncated Fock spaces and is used to check the effective model.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{operator_cosine, ComplexMatrix, ZERO};
use crate::operators::{annihilation, number, position_quadrature, sigma_minus, sigma_plus, sigma_z};
use crate::space::{DensityMatrix, SpaceLayout, StateVector, EXCITED, FIELD, FLYING, GROUND, ION, VIB};
use crate::tolerances;

/// Electronic level of a two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Excited,
    Ground,
}

impl Level {
    pub fn digit(self) -> usize {
        match self {
            Level::Excited => EXCITED,
            Level::Ground => GROUND,
        }
    }
}

/// Couplings and transit times of the effective model in both cavities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Effective coupling in cavity A, s^-1.
    pub lambda1: f64,
    /// Effective coupling in cavity B, s^-1.
    pub lambda2: f64,
    /// Transit time through cavity A, s.
    pub t_a: f64,
    /// Transit time through cavity B, s.
    pub t_b: f64,
}

impl EffectiveParams {
    /// Canonical protocol for a fixed transit time through both cavities:
    /// `lambda1 t = pi/4` and `lambda2 t = pi/2`. The atom speed is fixed, so
    /// the two interaction areas differ only through the couplings.
    pub fn canonical(transit_time: f64) -> Self {
        Self {
            lambda1: FRAC_PI_4 / transit_time,
            lambda2: FRAC_PI_2 / transit_time,
            t_a: transit_time,
            t_b: transit_time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("t_a", self.t_a),
            ("t_b", self.t_b),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Interaction area `lambda1 t_a` in cavity A.
    pub fn area_a(&self) -> f64 {
        self.lambda1 * self.t_a
    }

    /// Interaction area `lambda2 t_b` in cavity B.
    pub fn area_b(&self) -> f64 {
        self.lambda2 * self.t_b
    }

    /// Whether both areas sit at `pi/4` and `pi/2` within `rel_tol`.
    pub fn is_canonical(&self, rel_tol: f64) -> bool {
        (self.area_a() - FRAC_PI_4).abs() <= rel_tol * FRAC_PI_4
            && (self.area_b() - FRAC_PI_2).abs() <= rel_tol * FRAC_PI_2
    }
}

impl Default for EffectiveParams {
    fn default() -> Self {
        Self::canonical(1e-4)
    }
}

/// Parameters of the full ion-atom-cavity Hamiltonian. Rates in s^-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullModelParams {
    pub g_ion: f64,
    pub g_fly: f64,
    /// Detuning `omega_cavity - omega_qubit`.
    pub delta: f64,
    /// Trap frequency.
    pub nu: f64,
    /// Lamb-Dicke parameter.
    pub eta: f64,
    pub n_field_max: usize,
    pub n_vib_max: usize,
}

impl FullModelParams {
    pub const DEFAULT_N_FIELD_MAX: usize = 10;
    pub const DEFAULT_N_VIB_MAX: usize = 2;

    /// Couplings matched so that `g_ion exp(-eta^2/2) = g_fly`, with
    /// `delta = delta_over_g * g_fly` and `nu = nu_over_delta * delta`.
    pub fn matched(g_fly: f64, delta_over_g: f64, eta: f64, nu_over_delta: f64) -> Self {
        let delta = delta_over_g * g_fly;
        Self {
            g_ion: g_fly * (eta * eta / 2.0).exp(),
            g_fly,
            delta,
            nu: nu_over_delta * delta,
            eta,
            n_field_max: Self::DEFAULT_N_FIELD_MAX,
            n_vib_max: Self::DEFAULT_N_VIB_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g_ion", self.g_ion),
            ("g_fly", self.g_fly),
            ("delta", self.delta),
            ("nu", self.nu),
            ("eta", self.eta),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if self.n_field_max < 1 || self.n_vib_max < 1 {
            return Err(Error::invalid("Fock truncations must be at least 1"));
        }
        Ok(())
    }

    /// Motionally averaged ion coupling `g_ion <0|cos[eta(a + a^dagger)]|0>`.
    pub fn averaged_ion_coupling(&self) -> f64 {
        self.g_ion * (-self.eta * self.eta / 2.0).exp()
    }

    /// Exchange rate the effective model predicts:
    /// `g_ion exp(-eta^2/2) g_fly / delta`.
    pub fn predicted_lambda(&self) -> f64 {
        if self.delta == 0.0 {
            return f64::INFINITY;
        }
        self.averaged_ion_coupling() * self.g_fly / self.delta
    }

    /// `delta >= 10 max(g_ion, g_fly)`.
    pub fn is_dispersive(&self) -> bool {
        self.delta >= 10.0 * self.g_ion.max(self.g_fly)
    }

    /// `delta <= nu / 10`.
    pub fn is_sideband_safe(&self) -> bool {
        self.delta <= self.nu / 10.0
    }

    /// Human-readable regime warnings; empty when both flags hold.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.is_dispersive() {
            out.push(format!(
                "not dispersive: delta = {:.4e} < 10 max(g_ion, g_fly) = {:.4e}",
                self.delta,
                10.0 * self.g_ion.max(self.g_fly)
            ));
        }
        if !self.is_sideband_safe() {
            out.push(format!(
                "sidebands not suppressed: delta = {:.4e} > nu/10 = {:.4e}",
                self.delta,
                self.nu / 10.0
            ));
        }
        out
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::full_model(self.n_field_max, self.n_vib_max)
    }
}

/// Initial state of the cavity field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldKind {
    Fock { n: usize },
    Thermal { nbar: f64 },
    /// Coherent state with real amplitude `alpha`.
    Coherent { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldStateSpec {
    #[serde(flatten)]
    pub kind: FieldKind,
    pub n_max: usize,
}

impl FieldStateSpec {
    pub fn fock(n: usize, n_max: usize) -> Self {
        Self {
            kind: FieldKind::Fock { n },
            n_max,
        }
    }

    pub fn thermal(nbar: f64, n_max: usize) -> Self {
        Self {
            kind: FieldKind::Thermal { nbar },
            n_max,
        }
    }

    pub fn coherent(alpha: f64, n_max: usize) -> Self {
        Self {
            kind: FieldKind::Coherent { alpha },
            n_max,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            FieldKind::Fock { n } => format!("fock({n})"),
            FieldKind::Thermal { nbar } => format!("thermal({nbar})"),
            FieldKind::Coherent { alpha } => format!("coherent({alpha})"),
        }
    }

    /// Untruncated weight that falls outside `0..=n_max`.
    pub fn tail_weight(&self) -> f64 {
        match self.kind {
            FieldKind::Fock { n } => {
                if n <= self.n_max {
                    0.0
                } else {
                    1.0
                }
            }
            FieldKind::Thermal { nbar } => (nbar / (1.0 + nbar)).powi(self.n_max as i32 + 1),
            FieldKind::Coherent { .. } => {
                let kept: f64 = self.raw_coherent_amplitudes().iter().map(|a| a * a).sum();
                (1.0 - kept).max(0.0)
            }
        }
    }

    fn raw_coherent_amplitudes(&self) -> Vec<f64> {
        let FieldKind::Coherent { alpha } = self.kind else {
            return Vec::new();
        };
        let mut amp = (-alpha * alpha / 2.0).exp();
        let mut out = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            if n > 0 {
                amp *= alpha / (n as f64).sqrt();
            }
            out.push(amp);
        }
        out
    }

    fn check(&self) -> Result<()> {
        match self.kind {
            FieldKind::Fock { n } if n > self.n_max => {
                return Err(Error::invalid(format!("fock({n}) exceeds n_max = {}", self.n_max)))
            }
            FieldKind::Thermal { nbar } if !(nbar.is_finite() && nbar >= 0.0) => {
                return Err(Error::invalid(format!("thermal nbar must be >= 0, got {nbar}")))
            }
            FieldKind::Coherent { alpha } if !alpha.is_finite() => {
                return Err(Error::invalid("coherent alpha must be finite"))
            }
            _ => {}
        }
        let tail = self.tail_weight();
        if tail > tolerances::FIELD_TAIL {
            return Err(Error::Truncation {
                tail,
                limit: tolerances::FIELD_TAIL,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    /// Photon-number distribution on the truncated space, renormalized.
    pub fn populations(&self) -> Result<Vec<f64>> {
        self.check()?;
        let raw: Vec<f64> = match self.kind {
            FieldKind::Fock { n } => (0..=self.n_max).map(|k| if k == n { 1.0 } else { 0.0 }).collect(),
            FieldKind::Thermal { nbar } => {
                let q = nbar / (1.0 + nbar);
                (0..=self.n_max).map(|k| q.powi(k as i32) / (1.0 + nbar)).collect()
            }
            FieldKind::Coherent { .. } => self.raw_coherent_amplitudes().iter().map(|a| a * a).collect(),
        };
        let total: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|p| p / total).collect())
    }

    /// Density matrix on a single `field` factor.
    pub fn density(&self) -> Result<DensityMatrix> {
        let layout = SpaceLayout::new([(FIELD, self.n_max + 1)])?;
        let matrix = match self.kind {
            FieldKind::Coherent { .. } => {
                self.check()?;
                let amps = self.raw_coherent_amplitudes();
                let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
                let v: Vec<C64> = amps.iter().map(|a| C64::new(a / norm, 0.0)).collect();
                ComplexMatrix::outer(&v, &v)
            }
            _ => ComplexMatrix::real_diagonal(&self.populations()?),
        };
        DensityMatrix::new(layout, matrix)
    }

    /// Decomposition into pure field states `(weight, amplitudes)`.
    pub fn pure_components(&self) -> Result<Vec<(f64, Vec<C64>)>> {
        let d = self.n_max + 1;
        match self.kind {
            FieldKind::Coherent { .. } => {
                let rho = self.density()?;
                let v: Vec<C64> = (0..d).map(|k| rho.matrix()[(k, 0)]).collect();
                let norm = crate::linalg::norm(&v);
                Ok(vec![(1.0, v.iter().map(|z| z / norm).collect())])
            }
            _ => Ok(self
                .populations()?
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 0.0)
                .map(|(n, p)| {
                    let mut v = vec![ZERO; d];
                    v[n] = C64::new(1.0, 0.0);
                    (p, v)
                })
                .collect()),
        }
    }
}

/// `lambda (sigma_+^a sigma_-^b + sigma_-^a sigma_+^b)` on `layout`.
pub fn effective_hamiltonian(lambda: f64, pair: (&str, &str), layout: &SpaceLayout) -> Result<ComplexMatrix> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::validation("exchange pair needs two distinct factors"));
    }
    for label in [a, b] {
        let dim = layout.dim_of(label)?;
        if dim != 2 {
            return Err(Error::validation(format!("factor `{label}` is not a qubit (dim {dim})")));
        }
    }
    let (sp, sm) = (sigma_plus(), sigma_minus());
    let forward = layout.embed_product(&[(a, &sp), (b, &sm)])?;
    let backward = layout.embed_product(&[(a, &sm), (b, &sp)])?;
    Ok((forward + backward).scale_real(lambda))
}

/// Full Hamiltonian `H0 + H_int` on `(f, ion, field, vib)`:
///
/// ```text
/// H0   = nu a^dag a + omega_cavity b^dag b + omega_qubit/2 (sz_ion + sz_f)
/// Hint = g_fly (s+_f b + s-_f b^dag)
///      + g_ion cos[eta (a + a^dag)] (s+_ion b + s-_ion b^dag)
/// ```
pub fn full_hamiltonian(p: &FullModelParams, omega_qubit: f64, omega_cavity: f64) -> Result<ComplexMatrix> {
    p.validate()?;
    let layout = p.layout();
    let b = annihilation(p.n_field_max);
    let (sp, sz) = (sigma_plus(), sigma_z());
    let motional = operator_cosine(&position_quadrature(p.n_vib_max).scale_real(p.eta))?;

    let mut h = layout.embed(VIB, &number(p.n_vib_max).scale_real(p.nu))?;
    h += &layout.embed(FIELD, &number(p.n_field_max).scale_real(omega_cavity))?;
    h += &layout.embed(ION, &sz.scale_real(omega_qubit / 2.0))?;
    h += &layout.embed(FLYING, &sz.scale_real(omega_qubit / 2.0))?;

    let fly = layout.embed_product(&[(FLYING, &sp), (FIELD, &b)])?;
    h += &(&fly + &fly.dagger()).scale_real(p.g_fly);

    let ion = layout.embed_product(&[(ION, &sp), (FIELD, &b), (VIB, &motional)])?;
    h += &(&ion + &ion.dagger()).scale_real(p.g_ion);
    Ok(h.hermitian_part())
}

/// Total excitation `b^dag b + (sz_f + sz_ion)/2` on the full-model layout.
pub fn excitation_number(p: &FullModelParams) -> Result<ComplexMatrix> {
    let layout = p.layout();
    let half_sz = sigma_z().scale_real(0.5);
    let mut n = layout.embed(FIELD, &number(p.n_field_max))?;
    n += &layout.embed(FLYING, &half_sz)?;
    n += &layout.embed(ION, &half_sz)?;
    Ok(n)
}

/// `|flying, ion> (x) rho_field (x) |0><0|_vib` on the full-model layout.
pub fn build_initial_state(
    flying: Level,
    ion: Level,
    field: &FieldStateSpec,
    n_vib_max: usize,
) -> Result<DensityMatrix> {
    let electronic = StateVector::basis(
        SpaceLayout::new([(FLYING, 2), (ION, 2)])?,
        &[flying.digit(), ion.digit()],
    )?
    .to_density();
    let vib = StateVector::basis(SpaceLayout::new([(VIB, n_vib_max + 1)])?, &[0])?.to_density();
    let field = field.density()?;
    DensityMatrix::product(&[&electronic, &field, &vib])
}
