use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mobius_core::experiments::{band_table, oracle_rows, BandRow, OracleRow};
use mobius_core::{
    nonreciprocity, preset, solve_scattering, sweep, transmission, Direction, Scenario,
    SelfEnergyConvention, Sweep, TransmissionCurve,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_config, to_config_text, Convention, FileSettings};
use crate::error::CliError;

/// Oracle agreement required by `--cross-check`.
pub const CROSS_CHECK_TOL: f64 = 1e-8;
/// Random in-band energies added to the cross-check.
pub const CROSS_CHECK_RANDOM: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    Config(PathBuf),
}

/// Everything the command line can set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub out: PathBuf,
    pub convention: Option<Convention>,
    pub eta: Option<f64>,
    pub omega: Option<f64>,
    pub zeta: Option<f64>,
    pub k_points: Option<usize>,
    pub delta_points: Option<usize>,
    pub cross_check: bool,
}

impl RunConfig {
    pub fn new(source: Source, out: impl Into<PathBuf>) -> Self {
        Self {
            source,
            out: out.into(),
            convention: None,
            eta: None,
            omega: None,
            zeta: None,
            k_points: None,
            delta_points: None,
            cross_check: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: Scenario<f64>,
    pub files: Vec<PathBuf>,
    /// `None` for a band table.
    pub max_abs_nr: Option<f64>,
    pub oracle_checked: usize,
}

/// Resolves the scenario source and applies command-line overrides.
pub fn load_scenario(cfg: &RunConfig) -> Result<(Scenario<f64>, FileSettings), CliError> {
    let (mut s, settings) = match &cfg.source {
        Source::Preset(name) => (preset::<f64>(name)?, FileSettings::default()),
        Source::Config(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
    };
    if let Some(c) = cfg.convention {
        s.set_convention(c.into());
    }
    if let Some(eta) = cfg.eta {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(CliError::Validation(format!(
                "eta must be finite and non-negative, got {eta}"
            )));
        }
        s.eta = Some(eta);
    }
    if let Some(w) = cfg.omega {
        s.set_lead_omega(w);
    }
    if let Some(z) = cfg.zeta {
        s.set_lead_zeta(z);
    }
    s.set_points(cfg.k_points, cfg.delta_points);
    s.left.validate()?;
    s.right.validate()?;
    s.validate()?;
    Ok((s, settings))
}

/// Runs the scenario and writes all output files.
pub fn execute(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let (s, settings) = load_scenario(cfg)?;
    let cross_check = cfg.cross_check || settings.cross_check;
    let echo = to_config_text(&s)?;

    if let Sweep::Bands { .. } = s.sweep {
        if cross_check {
            return Err(CliError::Validation(
                "cross-check needs a momentum or detuning sweep".into(),
            ));
        }
        let rows = band_table(&s)?;
        let files = write_all(
            &cfg.out,
            vec![
                ("bands.csv", bands_csv(&rows)),
                ("summary.txt", bands_summary(&s, rows.len(), &echo)),
                ("plot.gp", bands_plot()),
            ],
        )?;
        return Ok(RunReport {
            scenario: s,
            files,
            max_abs_nr: None,
            oracle_checked: 0,
        });
    }

    if cross_check
        && (s.left.convention != SelfEnergyConvention::Surface
            || s.right.convention != SelfEnergyConvention::Surface)
    {
        return Err(CliError::Validation(
            "cross-check requires the surface convention; the oracle has no literal counterpart".into(),
        ));
    }

    let curve = sweep(&s)?;
    let oracle = if cross_check {
        Some(cross_check_rows(&s, &curve, settings.seed)?)
    } else {
        None
    };

    let nr = nonreciprocity(&curve);
    let mut outputs = vec![
        ("curve.csv", curve_csv(&curve)),
        ("plot.gp", curve_plot(&s)),
    ];
    let mut verdict = None;
    if let Some(rows) = &oracle {
        let failures = rows.iter().filter(|r| !(r.abs_diff() < CROSS_CHECK_TOL)).count();
        let worst = rows.iter().map(OracleRow::abs_diff).fold(0.0, f64::max);
        outputs.push(("oracle.csv", oracle_csv(rows)));
        verdict = Some((failures, rows.len(), worst));
    }
    outputs.push(("summary.txt", curve_summary(&s, &curve, verdict, &echo)));
    let files = write_all(&cfg.out, outputs)?;

    if let Some((failures, checked, worst)) = verdict {
        if failures > 0 {
            return Err(CliError::CrossCheck {
                failures,
                checked,
                worst,
            });
        }
    }
    Ok(RunReport {
        scenario: s,
        files,
        max_abs_nr: Some(nr.max_abs),
        oracle_checked: verdict.map_or(0, |v| v.1),
    })
}

/// Oracle rows for every propagating curve sample plus random in-band
/// energies on the configured device.
fn cross_check_rows(
    s: &Scenario<f64>,
    curve: &TransmissionCurve<f64>,
    seed: u64,
) -> Result<Vec<OracleRow<f64>>, CliError> {
    if s.left.omega != s.right.omega || s.left.zeta != s.right.zeta {
        return Err(CliError::Validation(
            "cross-check requires both leads to share omega and zeta".into(),
        ));
    }
    let mut rows = oracle_rows(s, curve)?;
    let device = s.device()?;
    let (lo, hi) = device.left.band();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CROSS_CHECK_RANDOM {
        let e: f64 = rng.gen_range(lo..hi);
        if e <= lo {
            continue;
        }
        rows.push(OracleRow {
            sweep_value: f64::NAN,
            direction: Direction::Plus,
            energy: e,
            t_negf: transmission(&device, e)?,
            t_oracle: solve_scattering(&device, e)?.transmission,
        });
    }
    Ok(rows)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CURVE_HEADER: &str =
    "sweep_value,energy_plus,energy_minus,T_plus,T_minus,NR,propagating_plus,propagating_minus";

pub fn curve_csv(curve: &TransmissionCurve<f64>) -> String {
    let mut out = String::with_capacity(curve.samples.len() * 160);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for p in &curve.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(p.sweep_value),
            num(p.energy_plus),
            num(p.energy_minus),
            num(p.t_plus),
            num(p.t_minus),
            num(p.t_plus - p.t_minus),
            p.propagating_plus,
            p.propagating_minus
        );
    }
    out
}

fn bands_csv(rows: &[BandRow<f64>]) -> String {
    let mut out = String::from("k,upper,lower\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", num(r.k), num(r.upper), num(r.lower));
    }
    out
}

fn oracle_csv(rows: &[OracleRow<f64>]) -> String {
    let mut out = String::from("sweep_value,direction,energy,T_negf,T_oracle,abs_diff\n");
    for r in rows {
        let (x, dir) = if r.sweep_value.is_nan() {
            (String::new(), "random")
        } else {
            let d = match r.direction {
                Direction::Plus => "plus",
                Direction::Minus => "minus",
            };
            (num(r.sweep_value), d)
        };
        let _ = writeln!(
            out,
            "{x},{dir},{},{},{},{}",
            num(r.energy),
            num(r.t_negf),
            num(r.t_oracle),
            num(r.abs_diff())
        );
    }
    out
}

fn sweep_name(s: &Scenario<f64>) -> &'static str {
    match s.sweep {
        Sweep::Momentum { .. } => "momentum",
        Sweep::Detuning { .. } => "detuning",
        Sweep::Bands { .. } => "bands",
    }
}

fn curve_summary(
    s: &Scenario<f64>,
    curve: &TransmissionCurve<f64>,
    verdict: Option<(usize, usize, f64)>,
    echo: &str,
) -> String {
    let nr = nonreciprocity(curve);
    let prop_plus = curve.samples.iter().filter(|p| p.propagating_plus).count();
    let prop_minus = curve.samples.iter().filter(|p| p.propagating_minus).count();
    let mut out = String::new();
    let _ = writeln!(out, "label = {}", s.label);
    let _ = writeln!(out, "sweep = {}", sweep_name(s));
    let _ = writeln!(out, "samples = {}", curve.samples.len());
    let _ = writeln!(out, "max_abs_nr = {}", num(nr.max_abs));
    match (nr.argmax, nr.argmax_index) {
        (Some(x), Some(i)) => {
            let _ = writeln!(out, "argmax = {}", num(x));
            let _ = writeln!(out, "argmax_index = {i}");
        }
        _ => {
            let _ = writeln!(out, "argmax = none");
        }
    }
    let _ = writeln!(out, "propagating_plus = {prop_plus}");
    let _ = writeln!(out, "propagating_minus = {prop_minus}");
    if let Some((failures, checked, worst)) = verdict {
        let _ = writeln!(out, "cross_check_points = {checked}");
        let _ = writeln!(out, "cross_check_failures = {failures}");
        let _ = writeln!(out, "cross_check_max_abs_diff = {}", num(worst));
    }
    out.push_str("\n# scenario\n");
    out.push_str(echo);
    out
}

fn bands_summary(s: &Scenario<f64>, rows: usize, echo: &str) -> String {
    format!(
        "label = {}\nsweep = bands\nsamples = {rows}\n\n# scenario\n{echo}",
        s.label
    )
}

fn curve_plot(s: &Scenario<f64>) -> String {
    let xlabel = match s.sweep {
        Sweep::Detuning { .. } => "Delta",
        _ => "|k|",
    };
    format!(
        "# gnuplot script; run `gnuplot plot.gp` in this directory\n\
         set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output 'curve.png'\n\
         set title '{label}'\n\
         set xlabel '{xlabel}'\n\
         set ylabel 'T'\n\
         set yrange [0:1.05]\n\
         set key top right\n\
         plot 'curve.csv' every ::1 using 1:4 with lines lc rgb 'red' dt 1 lw 2 title '+k', \\\n\
         \x20    'curve.csv' every ::1 using 1:5 with lines lc rgb 'blue' dt 2 lw 2 title '-k'\n",
        label = s.label
    )
}

fn bands_plot() -> String {
    "# gnuplot script; run `gnuplot plot.gp` in this directory\n\
     set datafile separator ','\n\
     set terminal pngcairo size 900,600\n\
     set output 'bands.png'\n\
     set xlabel 'k'\n\
     set ylabel 'E'\n\
     set xrange [-pi:pi]\n\
     plot 'bands.csv' every ::1 using 1:2 with lines lc rgb 'red' lw 2 title 'upper', \\\n\
     \x20    'bands.csv' every ::1 using 1:3 with lines lc rgb 'blue' lw 2 title 'lower'\n"
        .to_string()
}

fn write_all(dir: &Path, files: Vec<(&str, String)>) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}
