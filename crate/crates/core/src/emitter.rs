//! Quantum-dot / micropillar source figures of merit.
//!
//! Lifetimes are in ps unless stated otherwise, energies in μeV (mode
//! energies in eV). The total decay rate of a Purcell-enhanced exciton is
//! taken as `(F_p + 1) / tau_bulk`: the cavity channel plus one bulk-like
//! channel.

use crate::error::{check_positive, check_probability, Error, Result};
use crate::math::{exp, fabs, sqrt};

/// Reduced Planck constant in μeV ns.
pub const HBAR_UEV_NS: f64 = 0.6582;

pub fn purcell_from_lifetime(tau_cav: f64, tau_bulk: f64) -> Result<f64> {
    check_positive("tau_cav", tau_cav)?;
    check_positive("tau_bulk", tau_bulk)?;
    if tau_cav >= tau_bulk {
        return Err(Error::domain("tau_cav", tau_cav, "< tau_bulk"));
    }
    Ok(tau_bulk / tau_cav - 1.0)
}

/// Inverse of [`purcell_from_lifetime`].
pub fn lifetime_from_purcell(purcell: f64, tau_bulk: f64) -> Result<f64> {
    check_positive("F_p", purcell)?;
    check_positive("tau_bulk", tau_bulk)?;
    Ok(tau_bulk / (purcell + 1.0))
}

/// `beta = F_p / (F_p + 1)`; infinite `F_p` gives 1.
pub fn mode_fraction(purcell: f64) -> Result<f64> {
    if purcell == f64::INFINITY {
        return Ok(1.0);
    }
    check_positive("F_p", purcell)?;
    Ok(purcell / (purcell + 1.0))
}

/// Both out-coupling efficiencies compatible with a minimum reflectivity
/// `R_min = (1 - 2 eta)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutCoupling {
    pub undercoupled: f64,
    pub overcoupled: f64,
}

impl OutCoupling {
    /// The overcoupled branch.
    pub fn selected(&self) -> f64 {
        self.overcoupled
    }
}

pub fn eta_out_from_reflectivity(r_min: f64) -> Result<OutCoupling> {
    check_probability("R_min", r_min)?;
    let s = sqrt(r_min);
    Ok(OutCoupling {
        undercoupled: (1.0 - s) / 2.0,
        overcoupled: (1.0 + s) / 2.0,
    })
}

/// `Q = E / kappa` with `E` in eV and `kappa` in μeV.
pub fn q_factor(mode_energy_ev: f64, kappa_uev: f64) -> Result<f64> {
    check_positive("mode_energy", mode_energy_ev)?;
    check_positive("kappa", kappa_uev)?;
    Ok(mode_energy_ev * 1e6 / kappa_uev)
}

/// Emitter and cavity parameters of one source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterCavityParams {
    pub purcell: f64,
    /// ps.
    pub tau_bulk: f64,
    pub eta_out: f64,
    /// μeV.
    pub fss: f64,
    /// μeV.
    pub cavity_pol_splitting: f64,
    /// μeV.
    pub kappa: f64,
    /// eV.
    pub mode_energy: f64,
    pub p_sat: f64,
    pub p_pi: f64,
    /// Purcell factor of the H-polarised transition as a fraction of
    /// `purcell`. `None` uses [`EmitterCavityParams::default_h_fraction`].
    pub h_purcell_fraction: Option<f64>,
}

impl EmitterCavityParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("F_p", self.purcell)?;
        check_positive("tau_bulk", self.tau_bulk)?;
        check_probability("eta_out", self.eta_out)?;
        if !(self.fss >= 0.0 && self.fss.is_finite()) {
            return Err(Error::domain("fss", self.fss, ">= 0"));
        }
        if !(self.cavity_pol_splitting >= 0.0 && self.cavity_pol_splitting.is_finite()) {
            return Err(Error::domain("cavity_pol_splitting", self.cavity_pol_splitting, ">= 0"));
        }
        check_positive("kappa", self.kappa)?;
        check_positive("mode_energy", self.mode_energy)?;
        check_positive("p_sat", self.p_sat)?;
        check_positive("p_pi", self.p_pi)?;
        if let Some(f) = self.h_purcell_fraction {
            check_probability("h_purcell_fraction", f)?;
        }
        Ok(())
    }

    pub fn mode_fraction(&self) -> f64 {
        self.purcell / (self.purcell + 1.0)
    }

    /// Lorentzian suppression of the cavity enhancement for a mode detuned
    /// by the polarisation splitting: `1 / (1 + (2 delta / kappa)^2)`.
    pub fn default_h_fraction(&self) -> f64 {
        let x = 2.0 * self.cavity_pol_splitting / self.kappa;
        1.0 / (1.0 + x * x)
    }

    pub fn h_fraction(&self) -> f64 {
        self.h_purcell_fraction.unwrap_or_else(|| self.default_h_fraction())
    }

    /// `(Gamma_V, Gamma_H)` in 1/ns.
    pub fn decay_rates(&self) -> (f64, f64) {
        let tau_ns = self.tau_bulk * 1e-3;
        (
            (self.purcell + 1.0) / tau_ns,
            (self.purcell * self.h_fraction() + 1.0) / tau_ns,
        )
    }
}

/// `beta eta_out (1 - exp(-P / P_sat))`.
pub fn brightness_nonresonant(p: &EmitterCavityParams, power_ratio: f64) -> Result<f64> {
    if !(power_ratio >= 0.0) {
        return Err(Error::domain("power_ratio", power_ratio, ">= 0"));
    }
    check_positive("F_p", p.purcell)?;
    check_probability("eta_out", p.eta_out)?;
    Ok(p.mode_fraction() * p.eta_out * (1.0 - exp(-power_ratio)))
}

/// Detection chain used to turn count rates into brightness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupCalibration {
    /// Pulses per second.
    pub rep_rate: f64,
    pub setup_efficiency: f64,
    pub polarized: bool,
}

impl SetupCalibration {
    pub fn validate(&self) -> Result<()> {
        check_positive("rep_rate", self.rep_rate)?;
        check_positive("setup_efficiency", self.setup_efficiency)?;
        check_probability("setup_efficiency", self.setup_efficiency)?;
        Ok(())
    }
}

/// Photons per pulse at the first lens, `count_rate / (rep_rate eff)`.
pub fn brightness_from_counts(count_rate: f64, cal: &SetupCalibration) -> Result<f64> {
    check_positive("count_rate", count_rate)?;
    cal.validate()?;
    Ok(count_rate / (cal.rep_rate * cal.setup_efficiency))
}

/// Mean overlap of two exponential wavepackets of lifetime `tau_rad` whose
/// emission starts after independent exponential delays of mean
/// `tau_relax`.
///
/// For a start-time difference `d` the overlap is `exp(-|d| / tau_rad)`;
/// `d` is Laplace distributed with scale `tau_relax`, giving
/// `tau_rad / (tau_rad + tau_relax)`.
pub fn jitter_limited_m(tau_rad: f64, tau_relax: f64) -> Result<f64> {
    check_positive("tau_rad", tau_rad)?;
    if !(tau_relax >= 0.0) {
        return Err(Error::domain("tau_relax", tau_relax, ">= 0"));
    }
    if tau_relax == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(tau_rad / (tau_rad + tau_relax))
}

/// Largest number of step halvings tried by [`resonant_px`].
pub const MAX_HALVINGS: u32 = 16;
/// Change between successive halvings accepted as converged.
pub const PX_TOLERANCE: f64 = 1e-10;
/// Population left when the integration stops.
const RESIDUAL_POPULATION: f64 = 1e-15;

/// H-channel emission probability with its integration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantOccupation {
    pub p_x: f64,
    /// Final step, ns.
    pub step: f64,
    /// Change of `p_x` on the last halving.
    pub change: f64,
    pub halvings: u32,
}

/// `[Re c_V, Im c_V, Re c_H, Im c_H, integral of Gamma_H |c_H|^2]`.
type State = [f64; 5];

fn derivative(s: &State, g: f64, gv: f64, gh: f64) -> State {
    // i dc_V/dt = g c_H - i gv/2 c_V, i dc_H/dt = g c_V - i gh/2 c_H.
    let (vr, vi, hr, hi) = (s[0], s[1], s[2], s[3]);
    [
        g * hi - gv / 2.0 * vr,
        -g * hr - gv / 2.0 * vi,
        g * vi - gh / 2.0 * hr,
        -g * vr - gh / 2.0 * hi,
        gh * (hr * hr + hi * hi),
    ]
}

fn axpy(a: &State, h: f64, k: &State) -> State {
    core::array::from_fn(|i| a[i] + h * k[i])
}

fn integrate_px(c0: f64, g: f64, gv: f64, gh: f64, step: f64, t_end: f64) -> f64 {
    let mut s: State = [c0, 0.0, 0.0, 0.0, 0.0];
    let steps = libm::ceil(t_end / step) as usize;
    for _ in 0..steps {
        let k1 = derivative(&s, g, gv, gh);
        let k2 = derivative(&axpy(&s, step / 2.0, &k1), g, gv, gh);
        let k3 = derivative(&axpy(&s, step / 2.0, &k2), g, gv, gh);
        let k4 = derivative(&axpy(&s, step, &k3), g, gv, gh);
        for i in 0..5 {
            s[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    s[4]
}

/// Occupation of the H-emitting exciton after resonant excitation along V.
///
/// A pulse of area ratio `P / P_pi` prepares V with population
/// `sin^2((pi/2) sqrt(P / P_pi))`. The fine-structure splitting couples the
/// V and H excitons at `FSS / (2 hbar)` while they decay at their own
/// Purcell-enhanced rates; `p_x` is the time-integrated emission through
/// the H channel. RK4 with the step halved until the result moves by less
/// than [`PX_TOLERANCE`].
pub fn resonant_px_with_diagnostics(p: &EmitterCavityParams, pulse_area_ratio: f64) -> Result<ResonantOccupation> {
    p.validate()?;
    if !(pulse_area_ratio >= 0.0 && pulse_area_ratio.is_finite()) {
        return Err(Error::domain("pulse_area_ratio", pulse_area_ratio, ">= 0"));
    }
    let pop = libm::sin(core::f64::consts::FRAC_PI_2 * sqrt(pulse_area_ratio));
    let c0 = fabs(pop);
    let g = p.fss / (2.0 * HBAR_UEV_NS);
    let (gv, gh) = p.decay_rates();
    if c0 == 0.0 || g == 0.0 {
        return Ok(ResonantOccupation {
            p_x: 0.0,
            step: 0.0,
            change: 0.0,
            halvings: 0,
        });
    }
    // Total population decays at least as fast as the slower channel.
    let t_end = -libm::log(RESIDUAL_POPULATION) / gv.min(gh);
    let mut step = 0.5 / (g + gv + gh);
    let mut prev = integrate_px(c0, g, gv, gh, step, t_end);
    let mut change = f64::INFINITY;
    for halvings in 1..=MAX_HALVINGS {
        step /= 2.0;
        let next = integrate_px(c0, g, gv, gh, step, t_end);
        change = fabs(next - prev);
        prev = next;
        if change < PX_TOLERANCE {
            return Ok(ResonantOccupation {
                p_x: next,
                step,
                change,
                halvings,
            });
        }
    }
    Err(Error::IntegratorNonConvergence {
        halvings: MAX_HALVINGS,
        step,
        change,
    })
}

pub fn resonant_px(p: &EmitterCavityParams, pulse_area_ratio: f64) -> Result<f64> {
    resonant_px_with_diagnostics(p, pulse_area_ratio).map(|r| r.p_x)
}
