//! Executes a scenario and writes its artifacts.
//!
//! Randomness: `synthesize` draws the HBT histogram from stream
//! `ids::HBT_HISTOGRAM` and the HOM histogram from `ids::HOM_HISTOGRAM` of
//! the scenario seed. The Monte Carlo check of `spdc-curve` gives grid point
//! `k` the heralded chunks starting at `2k * MONTE_CARLO_POINT_STRIDE` and
//! the interference chunks at `(2k + 1) * MONTE_CARLO_POINT_STRIDE`.

use std::fs;
use std::path::{Path, PathBuf};

use photonsrc_core::emitter::{
    self, brightness_from_counts, brightness_nonresonant, eta_out_from_reflectivity, jitter_limited_m,
    lifetime_from_purcell, purcell_from_lifetime, q_factor, resonant_px_with_diagnostics, EmitterCavityParams,
    SetupCalibration,
};
use photonsrc_core::fock::ThresholdDetector;
use photonsrc_core::fom::{self, mu_grid, polarized_brightness, reference_points, FigureOfMerit, Measured, SourceKind};
use photonsrc_core::hom::{self, expected_peak_areas, matrix_from_transmissions, HomSetup};
use photonsrc_core::rng::ids;
use photonsrc_core::spdc::monte_carlo::{hom_estimate, SAMPLER_UNITARITY_LIMIT};
use photonsrc_core::spdc::{
    self, calibrate_transmittance, profile_template, Calibration, SpdcSetup, SqueezedPairSource, CALIBRATION_G2,
    CALIBRATION_MU,
};
use photonsrc_core::tcspc::profiles::{SourceProfile, REP_PERIOD_82MHZ};
use photonsrc_core::tcspc::{
    extract_g2, extract_m, fit_histogram, synthesize_histogram, FitOptions, HistogramMode, PeakFit, PeakShape, Truth,
};

use crate::dataset::Comparison;
use crate::error::CliError;
use crate::histogram;
use crate::parallel;
use crate::report::{Cell, Format, Table};
use crate::scenario::{
    CountsSection, CurveSection, EmitterSection, Experiments, InterferometerSection, Mode, MonteCarloSection, Scenario,
    SourcePreset, SpdcProfile, SpdcSection,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Overrides the scenario seed.
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub format: Format,
    /// Directory that relative paths in the scenario refer to.
    pub base_dir: PathBuf,
}

/// Invalid parameters reported by the core count as scenario errors.
fn param<T>(r: photonsrc_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::schema(e.to_string()))
}

struct Runner<'a> {
    scenario: &'a Scenario,
    seed: u64,
    opts: &'a RunOptions,
    written: Vec<PathBuf>,
}

impl Runner<'_> {
    fn table(&mut self, table: &Table, stem: &str) -> Result<(), CliError> {
        let path = table.write(&self.opts.out, stem, self.opts.format)?;
        self.written.push(path);
        Ok(())
    }

    fn path(&self, p: &Path) -> PathBuf {
        self.opts.base_dir.join(p)
    }
}

/// Runs `scenario` and returns the files written, in order.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&opts.out).map_err(|e| CliError::io(&opts.out, e))?;
    let mut r = Runner {
        scenario,
        seed: opts.seed.unwrap_or(scenario.seed),
        opts,
        written: Vec::new(),
    };
    match scenario.mode {
        Mode::SpdcCurve => spdc_curve(&mut r)?,
        Mode::QdBrightness => qd_brightness(&mut r)?,
        Mode::Hom => hom_mode(&mut r)?,
        Mode::Synthesize => synthesize(&mut r)?,
        Mode::Fit => fit(&mut r)?,
        Mode::Extract => extract(&mut r)?,
        Mode::Compare => compare(&mut r)?,
    }
    Ok(r.written)
}

fn quantity_table() -> Table {
    Table::new(&["quantity", "value", "unit"])
}

fn quantity(t: &mut Table, name: &str, value: impl Into<Cell>, unit: &str) {
    t.push(vec![name.into(), value.into(), unit.into()]);
}

pub fn build_spdc_setup(sec: &SpdcSection) -> Result<(SpdcSetup, Option<Calibration>), CliError> {
    let mut setup = match sec.profile {
        SpdcProfile::Calibrated => profile_template(),
        SpdcProfile::Ideal => SpdcSetup::ideal(),
    };
    if let Some(eff) = sec.detector_efficiency {
        setup.herald_detector = param(ThresholdDetector::new(eff, setup.herald_detector.dark_prob()))?;
        for d in &mut setup.hbt_detectors {
            *d = param(ThresholdDetector::new(eff, d.dark_prob()))?;
        }
    }
    if let Some(dark) = sec.herald_dark {
        setup.herald_detector = param(ThresholdDetector::new(setup.herald_detector.efficiency(), dark))?;
    }
    if let Some(dark) = sec.hbt_dark {
        for d in &mut setup.hbt_detectors {
            *d = param(ThresholdDetector::new(d.efficiency(), dark))?;
        }
    }
    if let Some(split) = sec.hbt_split {
        setup.hbt_split = split;
    }
    if let Some([t11, t12, t21, t22]) = sec.splitter_transmissions {
        setup.hom_matrix = param(matrix_from_transmissions(t11, t12, t21, t22))?;
    }
    let explicit =
        sec.transmittance.is_some() || sec.herald_transmittance.is_some() || sec.signal_transmittance.is_some();
    let calibrating = sec.profile == SpdcProfile::Calibrated && !explicit;
    if !calibrating && (sec.calibration_mu.is_some() || sec.calibration_g2.is_some()) {
        return Err(CliError::schema(
            "calibration_mu/calibration_g2 need the calibrated profile without explicit transmittances",
        ));
    }
    let mut calibration = None;
    if calibrating {
        param(setup.validate())?;
        let cal = calibrate_transmittance(
            &setup,
            sec.calibration_mu.unwrap_or(CALIBRATION_MU),
            sec.calibration_g2.unwrap_or(CALIBRATION_G2),
        )?;
        if !cal.bracketed {
            eprintln!(
                "warning: calibration target not reachable; using transmittance {}",
                cal.transmittance
            );
        }
        setup = setup.with_transmittance(cal.transmittance);
        calibration = Some(cal);
    }
    if let Some(t) = sec.transmittance {
        setup = setup.with_transmittance(t);
    }
    if let Some(t) = sec.herald_transmittance {
        setup.herald_transmittance = t;
    }
    if let Some(t) = sec.signal_transmittance {
        setup.signal_transmittance = t;
    }
    param(setup.validate())?;
    Ok((setup, calibration))
}

fn curve_grid(c: &CurveSection) -> Result<Vec<f64>, CliError> {
    let grid = match &c.mu {
        Some(mu) => mu.clone(),
        None => {
            if c.points == 0 {
                return Err(CliError::schema("curve.points must be positive"));
            }
            mu_grid(c.mu_max, c.points)
        }
    };
    if grid.is_empty() || grid.iter().any(|&m| !(m > 0.0 && m <= 0.1)) {
        return Err(CliError::schema("curve grid must be nonempty and lie in (0, 0.1]"));
    }
    Ok(grid)
}

fn profile_table(setup: &SpdcSetup, cal: Option<&Calibration>) -> Table {
    let mut t = quantity_table();
    quantity(&mut t, "herald_transmittance", setup.herald_transmittance, "");
    quantity(&mut t, "signal_transmittance", setup.signal_transmittance, "");
    quantity(&mut t, "herald_efficiency", setup.herald_detector.efficiency(), "");
    quantity(&mut t, "herald_dark", setup.herald_detector.dark_prob(), "per gate");
    for (i, d) in setup.hbt_detectors.iter().enumerate() {
        quantity(&mut t, &format!("detector{i}_efficiency"), d.efficiency(), "");
        quantity(&mut t, &format!("detector{i}_dark"), d.dark_prob(), "per gate");
    }
    quantity(&mut t, "hbt_split", setup.hbt_split, "");
    if let Some(c) = cal {
        quantity(&mut t, "calibrated_g2", c.g2, "");
        quantity(&mut t, "calibration_bracketed", i64::from(c.bracketed), "");
    }
    t
}

fn spdc_curve(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let (setup, cal) = build_spdc_setup(&s.spdc.clone().unwrap_or_default())?;
    let grid = curve_grid(&s.curve.clone().unwrap_or_default())?;
    let curve = fom::spdc_limit_curve(&setup, &grid)?;
    let mut t = Table::new(&["mu", "g2", "m"]);
    for p in &curve {
        t.push(vec![p.mu.into(), p.g2.into(), p.m.into()]);
    }
    r.table(&profile_table(&setup, cal.as_ref()), "spdc_profile")?;
    r.table(&t, "spdc_curve")?;
    if let Some(mc) = &s.monte_carlo {
        let t = monte_carlo(&setup, mc, r.seed)?;
        r.table(&t, "spdc_monte_carlo")?;
    }
    Ok(())
}

fn monte_carlo(setup: &SpdcSetup, mc: &MonteCarloSection, seed: u64) -> Result<Table, CliError> {
    if mc.trials == 0 || mc.mu.is_empty() {
        return Err(CliError::schema("monte_carlo needs trials > 0 and a nonempty mu list"));
    }
    let interference = setup.hom_matrix.unitarity_deviation() <= SAMPLER_UNITARITY_LIMIT;
    if !interference {
        eprintln!("note: splitter matrix is not unitary; Monte Carlo M columns left empty");
    }
    let mut t = Table::new(&[
        "mu",
        "trials",
        "g2_enumeration",
        "g2_monte_carlo",
        "g2_standard_error",
        "m_enumeration",
        "m_monte_carlo",
        "m_standard_error",
    ]);
    for (k, &mu) in mc.mu.iter().enumerate() {
        let src = param(SqueezedPairSource::from_mu(mu))?;
        let base = 2 * k as u64 * ids::MONTE_CARLO_POINT_STRIDE;
        let tally = parallel::herald(&src, setup, seed, base, mc.trials, mc.workers);
        let mut row: Vec<Cell> = vec![
            mu.into(),
            Cell::Int(mc.trials as i64),
            spdc::heralded_g2(&src, setup)?.into(),
            tally.g2().into(),
            tally.g2_standard_error().into(),
        ];
        if interference {
            let base = base + ids::MONTE_CARLO_POINT_STRIDE;
            let h = parallel::hom(&src, setup, mc.intrinsic_m, seed, base, mc.trials, mc.workers)?;
            let (m, se) = hom_estimate(&h, setup)?;
            row.extend([
                spdc::effective_indistinguishability(&src, setup, mc.intrinsic_m)?.into(),
                m.into(),
                se.into(),
            ]);
        } else {
            row.extend([
                spdc::effective_indistinguishability(&src, setup, mc.intrinsic_m)?.into(),
                Cell::Missing,
                Cell::Missing,
            ]);
        }
        t.push(row);
    }
    Ok(t)
}

fn emitter_params(e: &EmitterSection) -> Result<EmitterCavityParams, CliError> {
    let purcell = match (e.purcell, e.cavity_lifetime_ps) {
        (Some(f), None) => f,
        (None, Some(tau)) => param(purcell_from_lifetime(tau, e.tau_bulk_ps))?,
        _ => {
            return Err(CliError::schema(
                "give exactly one of emitter.purcell and emitter.cavity_lifetime_ps",
            ))
        }
    };
    let eta_out = match (e.eta_out, e.reflectivity_min) {
        (Some(eta), None) => eta,
        (None, Some(r)) => param(eta_out_from_reflectivity(r))?.selected(),
        _ => {
            return Err(CliError::schema(
                "give exactly one of emitter.eta_out and emitter.reflectivity_min",
            ))
        }
    };
    let p = EmitterCavityParams {
        purcell,
        tau_bulk: e.tau_bulk_ps,
        eta_out,
        fss: e.fss_uev,
        cavity_pol_splitting: e.cavity_pol_splitting_uev,
        kappa: e.kappa_uev,
        mode_energy: e.mode_energy_ev,
        p_sat: 1.0,
        p_pi: 1.0,
        h_purcell_fraction: e.h_purcell_fraction,
    };
    param(p.validate())?;
    Ok(p)
}

fn qd_brightness(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let e = s.emitter.as_ref().expect("checked by the scenario");
    let p = emitter_params(e)?;
    let mut t = quantity_table();
    let lifetime = param(lifetime_from_purcell(p.purcell, p.tau_bulk))?;
    quantity(&mut t, "purcell", p.purcell, "");
    quantity(&mut t, "cavity_lifetime", lifetime, "ps");
    quantity(&mut t, "mode_fraction", param(emitter::mode_fraction(p.purcell))?, "");
    quantity(&mut t, "eta_out", p.eta_out, "");
    quantity(&mut t, "q_factor", param(q_factor(p.mode_energy, p.kappa))?, "");
    quantity(
        &mut t,
        "brightness_nonresonant",
        param(brightness_nonresonant(&p, e.power_ratio))?,
        "photons/pulse",
    );
    quantity(&mut t, "h_purcell_fraction", p.h_fraction(), "");
    let occ = resonant_px_with_diagnostics(&p, e.pulse_area)?;
    quantity(&mut t, "resonant_p_x", occ.p_x, "");
    quantity(&mut t, "resonant_step_halvings", i64::from(occ.halvings), "");
    quantity(&mut t, "resonant_last_change", occ.change, "");
    if let Some(relax) = e.tau_relax_ps {
        quantity(
            &mut t,
            "jitter_limited_m",
            param(jitter_limited_m(lifetime, relax))?,
            "",
        );
    }
    r.table(&t, "qd_brightness")?;
    if let Some(c) = &s.counts {
        r.table(&counts_table(c)?, "qd_counts")?;
    }
    Ok(())
}

fn counts_table(c: &CountsSection) -> Result<Table, CliError> {
    let cal = SetupCalibration {
        rep_rate: c.rep_rate_mhz * 1e6,
        setup_efficiency: c.setup_efficiency,
        polarized: c.polarized,
    };
    let mut t = Table::new(&["count_rate_mhz", "brightness", "polarized_brightness"]);
    for &rate in &c.rates_mhz {
        let b = param(brightness_from_counts(rate * 1e6, &cal))?;
        let pb = if b <= 1.0 {
            Cell::Num(param(polarized_brightness(b, c.polarized))?)
        } else {
            Cell::Missing
        };
        t.push(vec![rate.into(), b.into(), pb]);
    }
    Ok(t)
}

fn interferometer(sec: &InterferometerSection, delay: f64, period: f64) -> Result<HomSetup, CliError> {
    let setup = param(HomSetup::from_splitting(
        sec.r,
        sec.t,
        sec.epsilon,
        sec.pulse_pair_delay_ns.unwrap_or(delay),
        sec.rep_period_ns.unwrap_or(period),
    ))?
    .with_uncertainties(sec.sigma_r, sec.sigma_t, sec.sigma_epsilon);
    param(setup.validate())?;
    Ok(setup)
}

fn hom_mode(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let matrix = match &s.splitter {
        Some(sp) => {
            let [a, b, c, d] = sp.transmissions;
            param(matrix_from_transmissions(a, b, c, d))?
        }
        None => hom::measured_splitter(),
    };
    let (d, p) = hom::det_per_intensities(&matrix)?;
    let mut t = quantity_table();
    quantity(&mut t, "d", d, "");
    quantity(&mut t, "p", p, "");
    quantity(&mut t, "maximal_visibility", hom::maximal_visibility(&matrix)?, "");
    if let Some(v) = &s.visibility {
        let res = hom::visibility_result(v.value, v.sigma, &matrix)?;
        quantity(&mut t, "visibility", res.v, "");
        quantity(&mut t, "visibility_sigma", res.sigma_v, "");
        quantity(&mut t, "m", res.m, "");
        quantity(&mut t, "m_sigma", res.sigma_m, "");
    }
    r.table(&t, "hom")?;
    match (&s.interferometer, &s.truth) {
        (Some(i), Some(truth)) => {
            let setup = interferometer(i, 3.0, REP_PERIOD_82MHZ)?;
            let areas = expected_peak_areas(&setup, truth.m, truth.g2)?;
            let mut t = Table::new(&["cluster", "offset", "delay_ns", "area"]);
            for (cluster, values) in [(0i64, &areas.central), (1, &areas.far)] {
                for (j, &a) in values.iter().enumerate() {
                    let offset = j as i64 - 2;
                    let delay = cluster as f64 * setup.rep_period + offset as f64 * setup.pulse_pair_delay;
                    t.push(vec![Cell::Int(cluster), Cell::Int(offset), delay.into(), a.into()]);
                }
            }
            r.table(&t, "hom_peak_areas")?;
        }
        (None, None) => {}
        _ => return Err(CliError::schema("[interferometer] and [truth] go together in mode hom")),
    }
    Ok(())
}

fn preset(p: SourcePreset) -> SourceProfile {
    match p {
        SourcePreset::Qd1Like => SourceProfile::qd1_like(),
        SourcePreset::Qd3Like => SourceProfile::qd3_like(),
    }
}

fn synthesize(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let sec = s.synthesis.as_ref().expect("checked by the scenario");
    let mut profile = preset(sec.profile);
    if let Some(rate) = sec.signal_rate_mhz {
        profile.rates.signal = rate * 1e6;
    }
    if let Some(d) = sec.dark_rates {
        profile.rates.dark = d;
    }
    if let Some(t) = sec.acquisition_time_s {
        profile.acquisition_time = t;
    }
    if let Some(b) = sec.bin_width_ns {
        profile.bin_width = b;
    }
    if let Some(k) = sec.clusters_per_side {
        profile.clusters_per_side = k;
    }
    profile.shape = PeakShape {
        decay_left: sec.decay_left_ns.unwrap_or(profile.shape.decay_left),
        decay_right: sec.decay_right_ns.unwrap_or(profile.shape.decay_right),
    };
    if let Some(i) = &s.interferometer {
        profile.hom = interferometer(i, profile.hom.pulse_pair_delay, profile.hom.rep_period)?;
    }
    let truth = s.truth.map_or(profile.truth, |t| Truth { m: t.m, g2: t.g2 });
    let mut summary = Table::new(&["file", "mode", "bins", "total_counts", "baseline_per_bin", "m", "g2"]);
    let configs = match sec.experiment {
        Experiments::Hbt => vec![profile.hbt_config()],
        Experiments::Hom => vec![profile.hom_config()],
        Experiments::Both => vec![profile.hbt_config(), profile.hom_config()],
    };
    for cfg in configs {
        param(cfg.validate())?;
        let h = synthesize_histogram(&cfg, &truth, r.seed)?;
        let name = format!("{}.txt", h.layout.mode.as_str());
        let path = r.opts.out.join(&name);
        histogram::write(&path, &h)?;
        r.written.push(path);
        summary.push(vec![
            name.into(),
            h.layout.mode.as_str().into(),
            Cell::Int(h.layout.bins as i64),
            Cell::Int(h.total() as i64),
            cfg.baseline_per_bin().into(),
            truth.m.into(),
            truth.g2.into(),
        ]);
    }
    r.table(&summary, "synthesis")
}

fn fit_tables(fit: &PeakFit) -> (Table, Table) {
    let mut peaks = Table::new(&["cluster", "offset", "center_ns", "area", "area_sigma"]);
    for p in &fit.peaks {
        peaks.push(vec![
            Cell::Int(p.cluster.into()),
            Cell::Int(p.offset.into()),
            p.center.into(),
            p.area.into(),
            p.sigma_area.into(),
        ]);
    }
    let mut t = quantity_table();
    let shape = fit.shape();
    quantity(&mut t, "mode", fit.mode().as_str(), "");
    quantity(&mut t, "baseline", fit.baseline, "counts/bin");
    quantity(&mut t, "baseline_sigma", fit.sigma_baseline, "counts/bin");
    quantity(&mut t, "decay_left", shape.decay_left, "ns");
    quantity(&mut t, "decay_right", shape.decay_right, "ns");
    quantity(&mut t, "center_shift", fit.center_shift, "ns");
    quantity(&mut t, "chi2", fit.chi2, "");
    quantity(&mut t, "dof", Cell::Int(fit.dof as i64), "");
    quantity(&mut t, "iterations", Cell::Int(fit.iterations as i64), "");
    (peaks, t)
}

fn fit(r: &mut Runner) -> Result<(), CliError> {
    let sec = r.scenario.fit.as_ref().expect("checked by the scenario");
    let h = histogram::read(&r.path(&sec.histogram))?;
    let mut options = FitOptions::default();
    if let Some(n) = sec.max_iterations {
        options.max_iterations = n;
    }
    if let Some(n) = sec.reweighting_passes {
        options.reweighting_passes = n;
    }
    let fit = fit_histogram(&h, &options)?;
    let (peaks, summary) = fit_tables(&fit);
    r.table(&peaks, "fit_peaks")?;
    r.table(&summary, "fit_summary")
}

fn extract(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let sec = s.extract.as_ref().expect("checked by the scenario");
    let hbt = histogram::read(&r.path(&sec.hbt))?;
    let hom = histogram::read(&r.path(&sec.hom))?;
    if hbt.layout.mode != HistogramMode::Hbt || hom.layout.mode != HistogramMode::Hom {
        return Err(CliError::schema(
            "extract.hbt must be an hbt histogram and extract.hom a hom histogram",
        ));
    }
    let i = s.interferometer.as_ref().expect("checked by the scenario");
    let (delay, period) = (hom.layout.pulse_pair_delay, hom.layout.rep_period);
    if i.pulse_pair_delay_ns.is_some_and(|d| d != delay) || i.rep_period_ns.is_some_and(|p| p != period) {
        return Err(CliError::schema(
            "interferometer delays disagree with the hom histogram header",
        ));
    }
    let setup = interferometer(i, delay, period)?;
    let options = FitOptions::default();
    let hbt_fit = fit_histogram(&hbt, &options)?;
    let hom_fit = fit_histogram(&hom, &options)?;
    let g2 = extract_g2(&hbt_fit)?;
    let res = extract_m(&hom_fit, &setup, g2)?;
    let mut t = Table::new(&["quantity", "value", "sigma"]);
    for (name, m) in [("g2", res.g2), ("m_raw", res.m_raw), ("m_corrected", res.m_corrected)] {
        t.push(vec![name.into(), m.value.into(), m.sigma.into()]);
    }
    r.table(&t, "extraction")?;
    let (peaks, summary) = fit_tables(&hbt_fit);
    r.table(&peaks, "hbt_peaks")?;
    r.table(&summary, "hbt_fit")?;
    let (peaks, summary) = fit_tables(&hom_fit);
    r.table(&peaks, "hom_peaks")?;
    r.table(&summary, "hom_fit")
}

fn compare(r: &mut Runner) -> Result<(), CliError> {
    let s = r.scenario;
    let sec = s.compare.clone().unwrap_or(crate::scenario::CompareSection {
        reference: true,
        points: Vec::new(),
    });
    let mut sources = if sec.reference { reference_points() } else { Vec::new() };
    for p in &sec.points {
        let kind =
            SourceKind::parse(&p.kind).ok_or_else(|| CliError::schema(format!("unknown source kind {:?}", p.kind)))?;
        let scale = if p.polarized { 1.0 } else { 0.5 };
        let pair = |v: Option<[f64; 2]>| v.map(|[v, s]| Measured::new(v, s));
        let point = FigureOfMerit {
            label: p.label.clone(),
            kind,
            brightness: Measured::new(
                param(polarized_brightness(p.brightness, p.polarized))?,
                p.brightness_sigma * scale,
            ),
            m_raw: pair(p.m_raw),
            m_corrected: pair(p.m_corrected),
            g2: pair(p.g2),
            note: p.note.clone(),
        };
        param(point.validate())?;
        sources.push(point);
    }
    let curve = match &s.curve {
        Some(c) => {
            let (setup, _) = build_spdc_setup(&s.spdc.clone().unwrap_or_default())?;
            fom::spdc_limit_curve(&setup, &curve_grid(c)?)?
        }
        None if s.spdc.is_some() => return Err(CliError::schema("[spdc] in mode compare needs a [curve] section")),
        None => Vec::new(),
    };
    if sources.is_empty() && curve.is_empty() {
        return Err(CliError::schema("comparison would be empty"));
    }
    let path = Comparison { sources, curve }.write(&r.opts.out, "comparison", r.opts.format)?;
    r.written.push(path);
    Ok(())
}
