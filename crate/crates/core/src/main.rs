use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use epi_ghost::interp::{IrConfig, ResampleMode};
use epi_ghost::io::{self, ImageFormat};
use epi_ghost::metrics::{residual_percent_of, NoiseCorner, ProfileAxis, QualityReport, RoiSpec};
use epi_ghost::pipeline::{self, Method, PipelineConfig};
use epi_ghost::simulator::{make_phantom, simulate_epi, ErrorModel, PhantomSpec};
use epi_ghost::{Error, KSpaceData, Result};

#[derive(Parser)]
#[command(
    name = "epi-ghost",
    version,
    about = "Nyquist ghost correction for EPI k-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhantomArg {
    Disk,
    TwoDisks,
    Rect,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ref,
    Pa,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum IrModeArg {
    Literal,
    CenteredAverage,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Row,
    Col,
}

#[derive(Clone, Copy, ValueEnum)]
enum CornerArg {
    Tl,
    Tr,
    Bl,
    Br,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic imaging scan, reference scan and ground truth.
    Simulate {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, value_enum, default_value = "disk")]
        phantom: PhantomArg,
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase_even: f64,
        /// Comma-separated coefficients in u = 2x/N - 1, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        xphase_poly: Option<String>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        shift_even: i64,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 1)]
        averages: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ref_out: Option<PathBuf>,
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
    /// Run a correction pipeline on an EPIK imaging scan.
    Correct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        ir: bool,
        #[arg(long)]
        interp_factor: Option<usize>,
        #[arg(long, value_enum)]
        ir_mode: Option<IrModeArg>,
        #[arg(long)]
        ir_passes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Before/after quality report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Reconstruct an EPIK file to a magnitude image.
    Recon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_image: PathBuf,
        #[arg(long)]
        out_raw: Option<PathBuf>,
    },
    /// GSR and SNR of an image (EPIK or PGM).
    Metrics {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        roi_size: Option<String>,
        #[arg(long)]
        noise_size: Option<String>,
        #[arg(long, value_enum, default_value = "tl")]
        noise_corner: CornerArg,
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-row or per-column magnitude profiles of an EPIK file, in its stored domain, as CSV.
    Profiles {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the IR stage over a list of interpolation factors.
    Sweep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "2,4,8,16,32,64,128")]
        interp_factors: String,
        #[arg(long, value_enum, default_value = "centered-average")]
        ir_mode: IrModeArg,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn parse_hw(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("expected HxW, got {s:?}"));
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        h.trim().parse().map_err(|_| bad())?,
        w.trim().parse().map_err(|_| bad())?,
    ))
}

fn mode(m: IrModeArg) -> ResampleMode {
    match m {
        IrModeArg::Literal => ResampleMode::Literal,
        IrModeArg::CenteredAverage => ResampleMode::CenteredAverage,
    }
}

fn load(path: &Path) -> Result<(KSpaceData, bool)> {
    io::read_epik_with_sidecar(path)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    io::atomic_write(path, text.as_bytes())
}

fn simulate(cmd: Command) -> Result<()> {
    let Command::Simulate {
        size,
        phantom,
        radius,
        phase_even,
        xphase_poly,
        shift_even,
        noise_sigma,
        averages,
        seed,
        out,
        ref_out,
        truth_out,
    } = cmd
    else {
        unreachable!()
    };
    let spec = match phantom {
        PhantomArg::Disk => PhantomSpec::disk(size, radius),
        PhantomArg::TwoDisks => PhantomSpec::two_disks(size, radius, 2.5 * radius),
        PhantomArg::Rect => PhantomSpec::rect(size, radius, radius),
    };
    let err = ErrorModel {
        const_phase_even: phase_even,
        xphase_poly_even: match xphase_poly {
            Some(s) => parse_list(&s, "--xphase-poly")?,
            None => Vec::new(),
        },
        peak_shift_even: shift_even,
        noise_sigma,
        averages,
        seed,
    };
    let sim = simulate_epi(&make_phantom(&spec)?, &err)?;
    io::write_epik_with_sidecar(&sim.k_formal, &out)?;
    if let Some(p) = ref_out {
        io::write_epik_with_sidecar(&sim.k_ref, &p)?;
    }
    if let Some(p) = truth_out {
        io::write_epik_with_sidecar(&sim.ground_truth_kspace, &p)?;
    }
    Ok(())
}

fn correct(cmd: Command) -> Result<()> {
    let Command::Correct {
        input,
        reference,
        method,
        ir,
        interp_factor,
        ir_mode,
        ir_passes,
        out,
        report,
    } = cmd
    else {
        unreachable!()
    };
    if !ir && (interp_factor.is_some() || ir_mode.is_some() || ir_passes.is_some()) {
        return Err(Error::Config(
            "--interp-factor/--ir-mode/--ir-passes require --ir".into(),
        ));
    }
    let method = match method {
        MethodArg::Ref => Method::Ref,
        MethodArg::Pa => Method::Pa,
        MethodArg::None => Method::None,
    };
    if method != Method::Ref && reference.is_some() {
        return Err(Error::Config("--ref is only used with --method ref".into()));
    }
    let mut cfg = PipelineConfig::new(method, ir);
    cfg.ir = IrConfig {
        interp_factor: interp_factor.unwrap_or(cfg.ir.interp_factor),
        mode: ir_mode.map(mode).unwrap_or(cfg.ir.mode),
        passes: ir_passes.unwrap_or(cfg.ir.passes),
    };
    let (formal, formal_side) = load(&input)?;
    let reference = match reference {
        Some(p) => {
            let (r, ref_side) = load(&p)?;
            if formal_side && ref_side && r.meta != formal.meta {
                return Err(Error::Config(format!(
                    "metadata of {} and {} disagree",
                    input.display(),
                    p.display()
                )));
            }
            Some(r)
        }
        None => None,
    };
    let outcome = pipeline::run_pipeline(&cfg, &formal, reference.as_ref())?;
    let json = match &report {
        Some(_) => Some(io::to_json_string(&io::pipeline_report_json(
            &cfg, &outcome,
        ))?),
        None => None,
    };
    io::write_epik_with_sidecar(&outcome.corrected, &out)?;
    if let (Some(p), Some(j)) = (report, json) {
        write_text(&p, &j)?;
    }
    Ok(())
}

fn recon(input: &Path, out_image: &Path, out_raw: Option<&Path>) -> Result<()> {
    let img = io::read_image_input(input)?;
    io::export_image(&img, out_image, ImageFormat::Pgm)?;
    if let Some(p) = out_raw {
        io::export_image(&img, p, ImageFormat::RawF64)?;
    }
    Ok(())
}

fn metrics(cmd: Command) -> Result<()> {
    let Command::Metrics {
        image,
        roi_size,
        noise_size,
        noise_corner,
        baseline,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let img = io::read_image_input(&image)?;
    let mut roi = RoiSpec::default_for(img.n_cols(), img.n_rows());
    if let Some(s) = roi_size {
        roi.signal_size = parse_hw(&s)?;
    }
    if let Some(s) = noise_size {
        roi.noise_size = parse_hw(&s)?;
    }
    roi.noise_corner = match noise_corner {
        CornerArg::Tl => NoiseCorner::Tl,
        CornerArg::Tr => NoiseCorner::Tr,
        CornerArg::Bl => NoiseCorner::Bl,
        CornerArg::Br => NoiseCorner::Br,
    };
    let mut report = QualityReport::measure(&img, &roi)?;
    if let Some(p) = baseline {
        let (gsr, base_roi) = io::baseline_from_json(&fs::read_to_string(&p)?)?;
        if let Some(r) = base_roi {
            if r != roi {
                return Err(Error::Config(format!(
                    "baseline {} was measured with a different ROI",
                    p.display()
                )));
            }
        }
        report.residual_percent = Some(residual_percent_of(report.gsr, gsr)?);
    }
    write_text(
        &out,
        &io::to_json_string(&io::quality_report_json(&report))?,
    )
}

fn profiles(input: &Path, axis: AxisArg, out: &Path) -> Result<()> {
    let k = io::read_epik(input)?;
    let axis = match axis {
        AxisArg::Row => ProfileAxis::Row,
        AxisArg::Col => ProfileAxis::Col,
    };
    write_text(out, &io::profiles_csv(k.matrix(), axis))
}

fn sweep(cmd: Command) -> Result<()> {
    let Command::Sweep {
        input,
        reference,
        interp_factors,
        ir_mode,
        out,
    } = cmd
    else {
        unreachable!()
    };
    let factors: Vec<usize> = parse_list(&interp_factors, "--interp-factors")?;
    if factors.is_empty() {
        return Err(Error::Config("--interp-factors is empty".into()));
    }
    let (formal, _) = load(&input)?;
    let reference = match reference {
        Some(p) => Some(load(&p)?.0),
        None => None,
    };
    let method = if reference.is_some() {
        Method::Ref
    } else {
        Method::Pa
    };
    let base_cfg = PipelineConfig::new(method, false);
    let base = pipeline::run_pipeline(&base_cfg, &formal, reference.as_ref())?;
    let entries = factors
        .par_iter()
        .map(|&f| {
            let cfg = PipelineConfig {
                ir_enabled: true,
                ir: IrConfig {
                    interp_factor: f,
                    mode: mode(ir_mode),
                    passes: 1,
                },
                ..base_cfg.clone()
            };
            let o = pipeline::run_pipeline(&cfg, &formal, reference.as_ref())?;
            let m = io::MeasureJson::from(&o.corrected_report);
            Ok(io::SweepEntryJson {
                interp_factor: f,
                interp_points: f * formal.n_cols(),
                gsr: m.gsr,
                snr: m.snr,
                snr_noise_free: m.snr_noise_free,
                residual_percent: o.corrected_report.residual_percent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = io::SweepReportJson {
        method,
        original: (&base.original).into(),
        preliminary: (&base.corrected_report).into(),
        entries,
        roi: base.roi,
    };
    write_text(&out, &io::to_json_string(&report)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        cmd @ Command::Simulate { .. } => simulate(cmd),
        cmd @ Command::Correct { .. } => correct(cmd),
        Command::Recon {
            input,
            out_image,
            out_raw,
        } => recon(&input, &out_image, out_raw.as_deref()),
        cmd @ Command::Metrics { .. } => metrics(cmd),
        Command::Profiles { input, axis, out } => profiles(&input, axis, &out),
        cmd @ Command::Sweep { .. } => sweep(cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("epi-ghost: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
