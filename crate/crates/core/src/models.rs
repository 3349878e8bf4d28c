//! Hamiltonians, jump operators and cat states of the driven-dissipative
//! one- and two-mode systems.
//!
//! Rates are dimensionless, measured in whatever energy unit the caller picks
//! (normally the two-photon decay rate of mode `a`). Jump operators carry the
//! square root of their rate, so the dissipator is the plain
//! `Σ_k (L ρ L† − ½{L†L, ρ})`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    coherent_amplitudes, embed, ladder_operators, tensor_product, warn_truncation, Dims, FockSpace,
    Operator, StateVector, Subsystem, C64, IM,
};

/// Parameters of one driven mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeParams {
    /// Pump-cavity detuning Δ.
    #[serde(default)]
    pub detuning: f64,
    /// Self-interaction (Kerr) strength U.
    #[serde(default)]
    pub kerr: f64,
    /// Two-photon drive G.
    #[serde(default, with = "crate::complex_serde")]
    pub drive: C64,
    /// Single-photon decay rate γ.
    #[serde(default)]
    pub gamma: f64,
    /// Two-photon decay rate η.
    #[serde(default)]
    pub eta: f64,
}

impl Default for ModeParams {
    fn default() -> Self {
        Self {
            detuning: 0.0,
            kerr: 0.0,
            drive: C64::new(0.0, 0.0),
            gamma: 0.0,
            eta: 0.0,
        }
    }
}

impl ModeParams {
    /// Δ = 0, U = η = 1, G = 10 e^{−iπ/4}, γ = 0.
    pub fn reference() -> Self {
        Self {
            detuning: 0.0,
            kerr: 1.0,
            drive: C64::from_polar(10.0, -std::f64::consts::FRAC_PI_4),
            gamma: 0.0,
            eta: 1.0,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.detuning, self.kerr, self.drive.re, self.drive.im, self.gamma, self.eta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite("mode parameters"));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "single-photon decay rate must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.eta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "two-photon decay rate must be non-negative, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// g (a b† + a† b).
    Linear,
    /// g (a b†² + a† b²).
    Nonlinear,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub strength: f64,
}

impl CouplingSpec {
    pub fn linear(g: f64) -> Self {
        Self {
            kind: CouplingKind::Linear,
            strength: g,
        }
    }

    pub fn nonlinear(g: f64) -> Self {
        Self {
            kind: CouplingKind::Nonlinear,
            strength: g,
        }
    }

    pub fn none() -> Self {
        Self {
            kind: CouplingKind::None,
            strength: 0.0,
        }
    }
}

/// Generator of a Lindblad master equation.
#[derive(Clone, Debug)]
pub struct SystemModel {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
}

impl SystemModel {
    /// Assembles a model from an arbitrary Hermitian Hamiltonian and jump list.
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let err = hamiltonian.hermiticity_error();
        if err > 1e-12 * hamiltonian.max_abs().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
        for j in &jumps {
            if j.dim() != hamiltonian.dim() {
                return Err(Error::DimensionMismatch {
                    expected: hamiltonian.dim(),
                    got: j.dim(),
                });
            }
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    pub fn dims(&self) -> Dims {
        self.hamiltonian.dims()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

struct ModeTerms {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
}

fn mode_terms(p: &ModeParams, space: FockSpace, with_drive: bool) -> ModeTerms {
    let l = ladder_operators(space);
    let a2 = &l.annihilation * &l.annihilation;
    let a2dag = a2.adjoint();
    let mut h = &(&l.number * (-p.detuning)) + &(&(&a2dag * &a2) * (0.5 * p.kerr));
    if with_drive {
        h = &h + &(&(&a2 * (0.5 * p.drive)) + &(&a2dag * (0.5 * p.drive.conj())));
    }
    let mut jumps = Vec::new();
    if p.gamma > 0.0 {
        jumps.push(&l.annihilation * p.gamma.sqrt());
    }
    if p.eta > 0.0 {
        jumps.push(&a2 * p.eta.sqrt());
    }
    ModeTerms {
        hamiltonian: h.hermitian_part(),
        jumps,
    }
}

/// H = −Δ a†a + (U/2) a†²a² + (G/2) a² + (G*/2) a†², jumps √γ a and √η a².
pub fn build_one_mode(p: &ModeParams, n: usize) -> Result<SystemModel> {
    p.validate()?;
    if n < 4 {
        return Err(Error::Truncation { min: 4, got: n });
    }
    let t = mode_terms(p, FockSpace::new(n)?, true);
    SystemModel::new(t.hamiltonian, t.jumps)
}

/// Two coupled modes. With [`CouplingKind::Nonlinear`] mode `b` is driven only
/// through the coupling, so `pb.drive` must be zero.
pub fn build_two_mode(
    pa: &ModeParams,
    pb: &ModeParams,
    coupling: &CouplingSpec,
    na: usize,
    nb: usize,
) -> Result<SystemModel> {
    pa.validate()?;
    pb.validate()?;
    for n in [na, nb] {
        if n < 4 {
            return Err(Error::Truncation { min: 4, got: n });
        }
    }
    if !(coupling.strength.is_finite() && coupling.strength >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coupling strength must be finite and non-negative, got {}",
            coupling.strength
        )));
    }
    if coupling.kind == CouplingKind::Nonlinear && pb.drive.norm() != 0.0 {
        return Err(Error::InvalidParameter(
            "mode b carries no two-photon drive under nonlinear coupling".into(),
        ));
    }
    let (sa, sb) = (FockSpace::new(na)?, FockSpace::new(nb)?);
    let dims = (na, nb);
    let ta = mode_terms(pa, sa, true);
    let tb = mode_terms(pb, sb, coupling.kind != CouplingKind::Nonlinear);

    let mut h = &embed(&ta.hamiltonian, Subsystem::A, dims)? + &embed(&tb.hamiltonian, Subsystem::B, dims)?;
    let la = ladder_operators(sa);
    let lb = ladder_operators(sb);
    let g = coupling.strength;
    match coupling.kind {
        CouplingKind::Linear => {
            let term = tensor_product(&la.annihilation, &lb.creation);
            h = &h + &(&(&term + &term.adjoint()) * g);
        }
        CouplingKind::Nonlinear => {
            let b2dag = &lb.creation * &lb.creation;
            let term = tensor_product(&la.annihilation, &b2dag);
            h = &h + &(&(&term + &term.adjoint()) * g);
        }
        CouplingKind::None => {}
    }

    let mut jumps = Vec::with_capacity(ta.jumps.len() + tb.jumps.len());
    for j in &ta.jumps {
        jumps.push(embed(j, Subsystem::A, dims)?);
    }
    for j in &tb.jumps {
        jumps.push(embed(j, Subsystem::B, dims)?);
    }
    SystemModel::new(h.hermitian_part(), jumps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Even,
    Odd,
}

impl CatParity {
    fn sign(self) -> f64 {
        match self {
            CatParity::Even => 1.0,
            CatParity::Odd => -1.0,
        }
    }
}

/// (|ξ⟩ ± |−ξ⟩)/√(2(1 ± e^{−2|ξ|²})), renormalized after truncation.
pub fn cat_state(xi: C64, parity: CatParity, n: usize) -> Result<StateVector> {
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(Error::NonFinite("cat amplitude"));
    }
    if parity == CatParity::Odd && xi.norm() == 0.0 {
        return Err(Error::InvalidParameter("odd cat with zero amplitude is the null vector".into()));
    }
    let space = FockSpace::new(n)?;
    warn_truncation(xi, n);
    let s = parity.sign();
    let norm = (2.0 * (1.0 + s * (-2.0 * xi.norm_sqr()).exp())).sqrt();
    // |ξ⟩ and |−ξ⟩ differ by (−1)^k on Fock index k.
    let coh = coherent_amplitudes(xi, n);
    let amps = DVector::from_iterator(
        n,
        coh.iter().enumerate().map(|(k, c)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *c * ((1.0 + s * sign) / norm)
        }),
    );
    StateVector::normalized(amps, space.dims())
}

/// Principal root of α² = G*/(iη − U); the partner component is −α.
///
/// The relation holds for zero detuning, which is the regime it is used in.
pub fn steady_alpha(p: &ModeParams) -> Result<C64> {
    p.validate()?;
    let denom = IM * p.eta - p.kerr;
    if denom.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "steady amplitude undefined when both eta and U vanish".into(),
        ));
    }
    Ok((p.drive.conj() / denom).sqrt())
}
