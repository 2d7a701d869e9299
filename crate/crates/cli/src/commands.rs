//! Subcommand implementations. Each returns the certified numbers for the
//! report and, when a declared expectation fails, the reason.

use std::path::Path;

use contframe::construct::{
    bessel_only_map, grouped_step_frame, parseval_step_frame, step_frame, unbounded_bessel,
    unbounded_bessel_with_bound, unbounded_frame, DiscreteSystem,
};
use contframe::field::FieldGrid;
use contframe::frame::{
    dual_reconstruct, frame_bounds_with, BoundsOptions, Entry, FrameDoc, ReconstructOptions, Verdict,
};
use contframe::gabor::{istft, stft, TimeFreqGrid, WindowSpec};
use contframe::io::{read_json, read_signal_file, to_json_string, write_field_file, write_signal_file};
use contframe::measure::PartitionBody;
use contframe::suite::{random, verify_suite, SuiteConfig, SuiteScale};
use contframe::wavelet::{cwt, energy_ratio, icwt, mexican_hat, morlet, ScaleShiftGrid, WaveletSpec};
use contframe::{Complex64, DiscretizedFrame, Error, FrameReport, Partition, Space, Vector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Command, Expectation, InputError, Outcome, Scale, TolFlags, VerifyConstruct};

/// Effective tolerances, echoed in every report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub tol_frame: f64,
    pub tol_parseval: f64,
    pub tol_recon: f64,
}

impl Tolerances {
    pub fn resolve(flags: &TolFlags, command: &Command) -> Self {
        let suite = matches!(command, Command::Verify { suite: Some(_), .. });
        let default_recon = if suite {
            SuiteConfig::default().tol_recon
        } else {
            ReconstructOptions::default().tol_recon
        };
        Tolerances {
            tol_frame: flags.tol_frame,
            tol_parseval: flags.tol_parseval,
            tol_recon: flags.tol_recon.unwrap_or(default_recon),
        }
    }

    fn bounds(&self) -> BoundsOptions {
        BoundsOptions { tol_frame_rel: self.tol_frame, tol_parseval: self.tol_parseval, ..Default::default() }
    }

    fn validate(&self) -> Result<(), InputError> {
        for (name, v) in [("tol-frame", self.tol_frame), ("tol-parseval", self.tol_parseval), ("tol-recon", self.tol_recon)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(InputError(format!("--{name} must be a nonnegative number, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn run(command: &Command, tol: &Tolerances) -> Result<Outcome, InputError> {
    tol.validate()?;
    match command {
        Command::Construct { spec, out } => construct(spec, out.as_deref(), tol),
        Command::Bounds { frame, expect } => bounds(frame, *expect, tol),
        Command::Reconstruct { frame, signal, out } => reconstruct(frame, signal, out.as_deref(), tol),
        Command::Cwt { wavelet, amin, amax, voices, signal, out, mirror, stride, omega0 } => {
            let opts = CwtArgs { wavelet, amin: *amin, amax: *amax, voices: *voices, mirror: *mirror, stride: *stride, omega0: *omega0 };
            run_cwt(&opts, signal, out)
        }
        Command::Stft { window, ymin, ymax, dy, gmin, gmax, dg, signal, out } => {
            let grid = ((*ymin, *ymax), *dy, (*gmin, *gmax), *dg);
            run_stft(window, grid, signal, out)
        }
        Command::Verify { construct, dim, cells, suite, seed } => match (construct, suite) {
            (_, Some(scale)) => run_suite(*scale, *seed, tol),
            (Some(c), None) => verify_construct(*c, *dim, *cells, *seed, tol),
            (None, None) => Err(InputError("verify needs --construct or --suite".into())),
        },
    }
}

fn load_frame(path: &Path) -> Result<DiscretizedFrame, InputError> {
    let doc: FrameDoc = read_json(path)?;
    Ok(DiscretizedFrame::try_from(&doc)?)
}

fn entries_to_vector(space: Space, entries: &[Entry]) -> Result<Vector, Error> {
    Vector::new(space, entries.iter().map(|&e| Complex64::from(e)).collect())
}

fn report_value(r: &FrameReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

#[derive(Debug, Deserialize)]
#[serde(tag = "construct", rename_all = "snake_case")]
enum ConstructSpec {
    Parseval {
        partition: PartitionBody,
    },
    Step {
        partition: PartitionBody,
        vectors: Vec<Vec<Entry>>,
    },
    BesselOnly {
        partition: PartitionBody,
        vectors: Vec<Vec<Entry>>,
    },
    Ex28 {
        h: Vec<Entry>,
        #[serde(default = "default_ex28_half_width")]
        half_width: f64,
        #[serde(default = "default_ex28_nodes")]
        nodes: usize,
    },
    Ex29 {
        h: Vec<Entry>,
        #[serde(default = "default_ex29_half_width")]
        half_width: f64,
        #[serde(default = "default_ex29_nodes")]
        nodes: usize,
        #[serde(default = "default_ex29_bessel_bound")]
        bessel_bound: f64,
    },
}

fn default_ex28_half_width() -> f64 {
    10.0
}
fn default_ex28_nodes() -> usize {
    2000
}
fn default_ex29_half_width() -> f64 {
    20.0
}
fn default_ex29_nodes() -> usize {
    8000
}
fn default_ex29_bessel_bound() -> f64 {
    0.01
}

fn system_from_entries(vectors: &[Vec<Entry>]) -> Result<DiscreteSystem, Error> {
    let first = vectors.first().ok_or_else(|| Error::InvalidParameter("no vectors".into()))?;
    let space = Space::coordinate(first.len())?;
    DiscreteSystem::new(vectors.iter().map(|v| entries_to_vector(space, v)).collect::<Result<_, _>>()?)
}

fn h_vector(h: &[Entry]) -> Result<Vector, Error> {
    entries_to_vector(Space::coordinate(h.len())?, h)
}

fn construct(spec_path: &Path, out: Option<&Path>, tol: &Tolerances) -> Result<Outcome, InputError> {
    let spec: ConstructSpec = read_json(spec_path)?;
    let opts = tol.bounds();
    let mut extra = json!({});
    let frame = match &spec {
        ConstructSpec::Parseval { partition } => parseval_step_frame(&Partition::try_from(partition)?)?,
        ConstructSpec::Step { partition, vectors } => {
            step_frame(&Partition::try_from(partition)?, &system_from_entries(vectors)?)?
        }
        ConstructSpec::BesselOnly { partition, vectors } => {
            bessel_only_map(&Partition::try_from(partition)?, &system_from_entries(vectors)?)?
        }
        ConstructSpec::Ex28 { h, half_width, nodes } => {
            let h = h_vector(h)?;
            // integral of the profile over [-L, L]
            let mass = if *half_width >= 1.0 { 6.0 - 2.0 / half_width } else { 4.0 * half_width.sqrt() };
            let truncated = mass * h.norm_sq();
            extra = json!({ "bessel_limit": 6.0 * h.norm_sq(), "truncated_limit": truncated });
            unbounded_bessel(&h, *half_width, *nodes)?
        }
        ConstructSpec::Ex29 { h, half_width, nodes, bessel_bound } => {
            let h = h_vector(h)?;
            let f = unbounded_bessel_with_bound(&h, *half_width, *nodes, *bessel_bound)?;
            let basis = DiscreteSystem::standard_basis(h.len())?;
            let g = grouped_step_frame(*f.space(), f.nodes(), f.weights(), &basis)?;
            let rg = frame_bounds_with(&g, &opts);
            let floor = (rg.lower.sqrt() - bessel_bound.sqrt()).powi(2);
            extra = json!({
                "bessel_bound": bessel_bound,
                "frame_lower": rg.lower,
                "frame_upper": rg.upper,
                "predicted_lower": floor,
                "predicted_upper": bessel_bound + rg.upper,
            });
            unbounded_frame(&f, &g)?
        }
    };
    let report = frame_bounds_with(&frame, &opts);
    if let Some(path) = out {
        std::fs::write(path, to_json_string(&FrameDoc::from(&frame))?).map_err(|e| InputError(e.to_string()))?;
    }
    Ok(Outcome::ok(json!({
        "nodes": frame.len(),
        "dim": frame.dim(),
        "max_node_norm": frame.max_node_norm(),
        "bounds": report_value(&report),
        "construction": extra,
    })))
}

fn expectation_met(expect: Expectation, r: &FrameReport) -> bool {
    match expect {
        Expectation::Frame => r.verdict == Verdict::Frame,
        Expectation::Bessel => r.verdict != Verdict::Invalid,
        Expectation::Parseval => r.parseval,
    }
}

fn bounds(path: &Path, expect: Option<Expectation>, tol: &Tolerances) -> Result<Outcome, InputError> {
    let frame = load_frame(path)?;
    let r = frame_bounds_with(&frame, &tol.bounds());
    let violation = expect
        .filter(|&e| !expectation_met(e, &r))
        .map(|e| format!("expected {e:?} but verdict is {:?} (A = {:e}, B = {:e})", r.verdict, r.lower, r.upper));
    Ok(Outcome {
        result: json!({ "expect": expect, "dim": frame.dim(), "nodes": frame.len(), "bounds": report_value(&r) }),
        violation,
    })
}

fn load_signal(path: &Path, space: Space) -> Result<Vector, Error> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let f = read_signal_file(path)?;
        space.ensure_compatible(f.space())?;
        Ok(f)
    } else {
        let entries: Vec<Entry> = read_json(path)?;
        entries_to_vector(space, &entries)
    }
}

fn reconstruct(frame_path: &Path, signal: &Path, out: Option<&Path>, tol: &Tolerances) -> Result<Outcome, InputError> {
    let frame = load_frame(frame_path)?;
    let f = load_signal(signal, *frame.space())?;
    let opts = ReconstructOptions { tol_recon: tol.tol_recon, bounds: tol.bounds() };
    let r = frame_bounds_with(&frame, &opts.bounds);
    let rec = match dual_reconstruct(&frame, &f, &opts) {
        Ok(rec) => rec,
        Err(e @ (Error::NotAFrame { .. } | Error::SolverDiverged { .. })) => {
            return Ok(Outcome {
                result: json!({ "bounds": report_value(&r) }),
                violation: Some(e.to_string()),
            })
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = out {
        if frame.space().is_sampled() {
            write_signal_file(path, &rec.f_hat)?;
        } else {
            let pairs: Vec<[f64; 2]> = rec.f_hat.as_slice().iter().map(|z| [z.re, z.im]).collect();
            std::fs::write(path, to_json_string(&pairs)?).map_err(|e| InputError(e.to_string()))?;
        }
    }
    Ok(Outcome::ok(json!({
        "bounds": report_value(&r),
        "residual": rec.residual,
        "iterations": rec.iterations,
    })))
}

struct CwtArgs<'a> {
    wavelet: &'a str,
    amin: f64,
    amax: f64,
    voices: usize,
    mirror: bool,
    stride: usize,
    omega0: f64,
}

fn run_cwt(args: &CwtArgs, signal: &Path, out: &Path) -> Result<Outcome, InputError> {
    let f = read_signal_file(signal)?;
    let space = *f.space();
    let psi = match args.wavelet {
        "mexican_hat" => mexican_hat(space)?,
        "morlet" => morlet(space, args.omega0)?,
        path => {
            let psi = read_signal_file(Path::new(path))?;
            if !psi.space().compatible(&space) {
                return Err(Error::GridMismatch(format!("wavelet on {} but signal on {space}", psi.space())).into());
            }
            psi
        }
    };
    let w = WaveletSpec::admissible(psi)?;
    let grid = ScaleShiftGrid::log_spaced(space, args.amin, args.amax, args.voices, args.stride, args.mirror)?;
    let field = cwt(&f, &w, &grid)?;
    write_field_file(out, &field)?;
    // Without a valid frame constant the field is still written, but the
    // tight-frame numbers are reported as null with the reason.
    let (constant, note) = match w.frame_constant(&grid) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (mut ratio, mut error) = (None, None);
    if constant.is_some() && f.norm() > 0.0 {
        ratio = Some(energy_ratio(&field, &w, &f)?);
        error = Some(icwt(&field, &w)?.sub(&f)?.norm() / f.norm());
    }
    Ok(Outcome::ok(json!({
        "wavelet": args.wavelet,
        "admissibility": w.admissibility(),
        "frame_constant": constant,
        "note": note,
        "scales": grid.rows(),
        "shifts": grid.cols(),
        "mirrored": args.mirror,
        "energy_ratio": ratio,
        "reconstruction_error": error,
    })))
}

type Lattice = ((f64, f64), f64, (f64, f64), f64);

fn run_stft(window: &str, (y, dy, gamma, dg): Lattice, signal: &Path, out: &Path) -> Result<Outcome, InputError> {
    let f = read_signal_file(signal)?;
    let space = *f.space();
    let win = match window {
        "gauss" => WindowSpec::gaussian(space)?,
        path => {
            let g = read_signal_file(Path::new(path))?;
            if !g.space().compatible(&space) {
                return Err(Error::GridMismatch(format!("window on {} but signal on {space}", g.space())).into());
            }
            WindowSpec::new(g)?
        }
    };
    let grid = TimeFreqGrid::covering(space, y, dy, gamma, dg)?;
    let field = stft(&f, &win, &grid)?;
    write_field_file(out, &field)?;
    let norm_sq = f.norm_sq();
    let ratio = (norm_sq > 0.0).then(|| field.energy() / (norm_sq * win.norm_sq()));
    let back = istft(&field, &win)?;
    let error = (norm_sq > 0.0).then(|| back.sub(&f).map(|d| d.norm() / f.norm())).transpose()?;
    let ((y0, y1), (g0, g1)) = grid.coverage();
    Ok(Outcome::ok(json!({
        "window": window,
        "window_norm_sq": win.norm_sq(),
        "coverage": { "y": [y0, y1], "gamma": [g0, g1] },
        "shifts": grid.cols(),
        "frequencies": grid.rows(),
        "energy_ratio": ratio,
        "reconstruction_error": error,
    })))
}

fn verify_construct(kind: VerifyConstruct, dim: usize, cells: usize, seed: u64, tol: &Tolerances) -> Result<Outcome, InputError> {
    let mut rng = random::rng(seed, 0);
    let weights = random::weights(&mut rng, cells);
    let partition = contframe::measure::make_partition(&weights)?;
    let opts = tol.bounds();
    match kind {
        VerifyConstruct::Parseval => {
            if cells != dim {
                return Err(InputError(format!(
                    "a Parseval step frame over an orthonormal basis needs cells = dim, got {cells} and {dim}"
                )));
            }
            let r = frame_bounds_with(&parseval_step_frame(&partition)?, &opts);
            let violation = (!r.parseval).then(|| format!("not Parseval: A = {:e}, B = {:e}", r.lower, r.upper));
            Ok(Outcome { result: json!({ "weights": weights, "bounds": report_value(&r) }), violation })
        }
        VerifyConstruct::BesselOnly => {
            let sys = random::system(&mut rng, dim, cells);
            let discrete = frame_bounds_with(&sys.counting_frame(), &opts).upper;
            let r = frame_bounds_with(&bessel_only_map(&partition, &sys)?, &opts);
            let gap = (r.upper - discrete).abs();
            let violation = if r.verdict != Verdict::BesselOnly {
                Some(format!("verdict {:?}, expected BesselOnly", r.verdict))
            } else if gap > tol.tol_frame * discrete.max(1.0) {
                Some(format!("B = {:e} differs from the discrete Bessel bound {discrete:e}", r.upper))
            } else {
                None
            };
            Ok(Outcome {
                result: json!({ "weights": weights, "discrete_bessel_bound": discrete, "bounds": report_value(&r) }),
                violation,
            })
        }
    }
}

fn run_suite(scale: Scale, seed: u64, tol: &Tolerances) -> Result<Outcome, InputError> {
    let cfg = SuiteConfig { seed, tol_recon: tol.tol_recon, bounds: tol.bounds() };
    let scale = match scale {
        Scale::Small => SuiteScale::Small,
        Scale::Full => SuiteScale::Full,
    };
    let report = verify_suite(scale, &cfg);
    let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.id, c.name)).collect();
    let violation = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")));
    Ok(Outcome { result: serde_json::to_value(&report).expect("report serializes"), violation })
}
