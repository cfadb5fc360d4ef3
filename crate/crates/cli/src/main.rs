use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use dualband::elements::Quality;
use dualband::metrics::{band_metrics, BandMetrics, DEFAULT_GRID, SUPPRESSION_DEFINITION};
use dualband::mna::AcSolver;
use dualband::netlist::{self, parse_value, AcSweep, Netlist};
use dualband::resonator::{poles_zeros, ResonatorSpec, Topology};
use dualband::sweep::{self, SweepKind};
use dualband::synthesis::{
    synthesize, synthesize_then_degrade, DesignSpec, LtsChoice, RefineOptions, SynthesizedNetwork,
};
use dualband::touchstone;

#[derive(Parser)]
#[command(name = "dualband", version, about = "Dual-band transformer matching network synthesis and analysis")]
struct Cli {
    /// Output path prefix for generated files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Frequency grid as `count,start,stop` (suffixes allowed).
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<AcSweep>,
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a network from a band plan.
    Synthesize(SynthArgs),
    /// Sweep a netlist and report band metrics.
    Analyze(AnalyzeArgs),
    /// Sweep one design parameter and write a CSV family.
    Sweep(SweepArgs),
    /// Pole/zero report of a tap resonator.
    Pz(PzArgs),
    /// Validate a netlist.
    Check { netlist: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum RefineModel {
    /// Refine lossless with unity coupling, then apply the given losses.
    Ideal,
    /// Refine with the given losses in place.
    Lossy,
    /// Keep the closed-form values.
    None,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_parser = parse_positive)]
    fl: f64,
    #[arg(long, value_parser = parse_positive)]
    fh: f64,
    #[arg(long, value_parser = parse_positive)]
    fsc: Option<f64>,
    #[arg(long, value_parser = parse_positive, default_value = "50")]
    ropt: f64,
    #[arg(long, value_parser = parse_positive, default_value = "50")]
    rl: f64,
    #[arg(long, value_parser = parse_number, default_value = "0")]
    cp: f64,
    #[arg(long, value_parser = parse_number, default_value = "0")]
    cs: f64,
    /// Size the parasitics for this primary inductance (overrides --cp, --cs).
    #[arg(long, value_parser = parse_positive)]
    lp: Option<f64>,
    #[arg(long, value_parser = parse_number, default_value = "1")]
    km: f64,
    #[arg(long, value_parser = parse_quality, default_value = "inf")]
    qxfmr: f64,
    #[arg(long, value_parser = parse_quality, default_value = "inf")]
    qt: f64,
    /// Lossless, unity coupling (overrides --km, --qxfmr, --qt).
    #[arg(long)]
    ideal: bool,
    /// Resonator inductance, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_lts)]
    lts: LtsChoice,
    #[arg(long, value_enum, default_value = "ideal")]
    refine: RefineModel,
}

#[derive(Args)]
struct AnalyzeArgs {
    netlist: PathBuf,
    #[arg(long, value_parser = parse_positive, default_value = "28g")]
    fl: f64,
    #[arg(long, value_parser = parse_positive, default_value = "38g")]
    fh: f64,
    /// Input and output port, e.g. `1,2`.
    #[arg(long, value_parser = parse_ports, default_value = "1,2")]
    ports: (usize, usize),
    /// Write a Touchstone file of the selected two-port.
    #[arg(long)]
    touchstone: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    kind: SweepKind,
    /// Design JSON written by `synthesize`.
    #[arg(long)]
    design: PathBuf,
    /// Comma-separated values; `inf` allowed for quality factors.
    #[arg(long, value_delimiter = ',', value_parser = parse_quality, required = true)]
    values: Vec<f64>,
    /// Interpret C_ts values as multiples of the designed C_ts.
    #[arg(long)]
    relative: bool,
}

#[derive(Args)]
struct PzArgs {
    #[arg(long)]
    design: Option<PathBuf>,
    #[arg(long, default_value = "III")]
    topology: Topology,
    #[arg(long, value_parser = parse_number)]
    lts: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    cts: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    cts1: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    lts1: Option<f64>,
}

fn parse_number(s: &str) -> Result<f64, String> {
    parse_value(s).map_err(|e| format!("{e} '{s}'"))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 { Ok(v) } else { Err(format!("must be positive, got {s}")) }
}

fn parse_quality(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") {
        Ok(f64::INFINITY)
    } else {
        parse_number(s)
    }
}

fn parse_lts(s: &str) -> Result<LtsChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(LtsChoice::Auto)
    } else {
        parse_positive(s).map(LtsChoice::Fixed)
    }
}

fn parse_grid(s: &str) -> Result<AcSweep, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected count,start,stop".into());
    }
    let count = parts[0].parse::<usize>().map_err(|e| e.to_string())?;
    let g = AcSweep::new(count, parse_number(parts[1])?, parse_number(parts[2])?);
    if g.is_valid() { Ok(g) } else { Err(format!("invalid grid '{s}'")) }
}

fn parse_ports(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected in,out")?;
    let a = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if a == 0 || b == 0 || a == b {
        return Err("ports are distinct and numbered from 1".into());
    }
    Ok((a, b))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn read_netlist(path: &Path) -> Result<Netlist, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    netlist::parse(&text).map_err(|e| fail(format!("{}:{}: {e}", path.display(), e.line)))
}

fn quality(q: f64) -> Quality {
    Quality::finite(q)
}

fn cmd_synthesize(cli: &Cli, a: &SynthArgs) -> Result<(), Failure> {
    let mut spec = DesignSpec {
        f_low: a.fl,
        f_high: a.fh,
        f_sc: a.fsc,
        r_opt: a.ropt,
        r_load: a.rl,
        c_par_primary: a.cp,
        c_par_secondary: a.cs,
        k_m: a.km,
        q_xfmr: quality(a.qxfmr),
        q_t: quality(a.qt),
    };
    if let Some(l_p) = a.lp {
        spec = spec.with_primary_inductance(l_p);
    }
    if a.ideal {
        spec = spec.ideal();
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let opts = RefineOptions::default();
    let net = match a.refine {
        RefineModel::Ideal => synthesize_then_degrade(&spec, a.lts, &opts),
        RefineModel::Lossy => synthesize(&spec, a.lts, Some(&opts)),
        RefineModel::None => synthesize(&spec, a.lts, None),
    }
    .map_err(|e| fail(e.to_string()))?;
    for w in &net.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    let prefix = cli.out.clone().unwrap_or_else(|| PathBuf::from("design"));
    let design_path = with_suffix(&prefix, ".design.json");
    let cir_path = with_suffix(&prefix, ".cir");
    write(&design_path, &(to_json(&net) + "\n"))?;
    let grid = cli.grid.unwrap_or(DEFAULT_GRID);
    write(&cir_path, &netlist::serialize(&design_netlist(&net, grid)))?;
    if cli.json {
        println!("{}", to_json(&net));
    } else {
        let t = &net.network.transformer;
        let r = &net.network.resonator;
        let d = &net.diagnostics;
        println!("n = {:.6}  L_p = {:.6e} H  L_s = {:.6e} H  split = {:.4}", d.n, t.l_primary, t.l_secondary, t.primary_split);
        println!("L_ts = {:.6e} H  C_ts = {:.6e} F  C_ts1 = {:.6e} F", r.l_ts, r.c_ts, r.c_ts1);
        println!("C_in = {:.6e} F  C_sc = {:.6e} F  alpha = {:.4}  delta = {:.4}  delta_min = {:.4}", d.c_in, d.c_sc, d.alpha, d.delta, d.delta_min);
        println!("residual norm = {:.3e}  |Z_out(f_SC)| = {:.3e} ohm", d.residual_norm, d.z_out_sc);
        println!("wrote {} and {}", design_path.display(), cir_path.display());
    }
    Ok(())
}

fn design_netlist(net: &SynthesizedNetwork, grid: AcSweep) -> Netlist {
    let s = &net.spec;
    let title = format!(
        "dual-band matching network {} / {} GHz, {} / {} ohm",
        s.f_low / 1e9,
        s.f_high / 1e9,
        s.r_opt,
        s.r_load
    );
    net.network.to_netlist(&title, grid)
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    netlist: String,
    ports: (usize, usize),
    points: usize,
    suppression_definition: &'a str,
    metrics: BandMetrics,
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<(), Failure> {
    if a.fl >= a.fh {
        return Err(usage("--fl must be below --fh"));
    }
    let n = read_netlist(&a.netlist)?;
    let solver = AcSolver::new(&n).map_err(|e| fail(format!("{}: {e}", a.netlist.display())))?;
    let ports = solver.port_refs().len();
    let (p1, p2) = a.ports;
    if ports < 2 {
        return Err(fail(format!("two-port metrics need 2 ports, {} declares {ports}", a.netlist.display())));
    }
    if p1 > ports || p2 > ports {
        return Err(fail(format!("port out of range: netlist has {ports} ports")));
    }
    let freqs = cli.grid.unwrap_or(n.analysis).frequencies();
    let full = solver.sparams(&freqs).map_err(|e| fail(format!("{}: {e}", a.netlist.display())))?;
    let resp = full.select(p1, p2).map_err(|e| fail(e.to_string()))?;
    let gain = resp.gain_curve(2, 1);
    let s11: Vec<_> = (0..freqs.len()).map(|k| resp.s_at(k, 1, 1)).collect();
    let s22: Vec<_> = (0..freqs.len()).map(|k| resp.s_at(k, 2, 2)).collect();
    let metrics = band_metrics(&freqs, &gain, Some(&s11), Some(&s22), a.fl, a.fh);
    if let Some(path) = &a.touchstone {
        write(path, &touchstone::emit(&resp).map_err(|e| fail(e.to_string()))?)?;
    }
    let report = AnalyzeReport {
        netlist: a.netlist.display().to_string(),
        ports: a.ports,
        points: freqs.len(),
        suppression_definition: SUPPRESSION_DEFINITION,
        metrics,
    };
    let text = to_json(&report);
    if let Some(prefix) = &cli.out {
        write(&with_suffix(prefix, ".metrics.json"), &(text.clone() + "\n"))?;
    }
    if cli.json {
        println!("{text}");
    } else {
        let m = &report.metrics;
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:.3}"));
        println!("insertion loss: {:.3} dB at {} Hz, {:.3} dB at {} Hz", m.il_low, m.f_low_grid, m.il_high, m.f_high_grid);
        match (m.f_notch, m.notch_db, m.suppression) {
            (Some(f), Some(g), Some(s)) => println!("notch: {f} Hz at {g:.3} dB, suppression {s:.3} dB"),
            _ => println!("notch: none between the bands"),
        }
        println!(
            "return loss in {} / {} dB, out {} / {} dB",
            opt(m.rl_in_low),
            opt(m.rl_in_high),
            opt(m.rl_out_low),
            opt(m.rl_out_high)
        );
    }
    Ok(())
}

fn read_design(path: &Path) -> Result<SynthesizedNetwork, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> Result<(), Failure> {
    let design = read_design(&a.design)?;
    let mut values = a.values.clone();
    if a.relative {
        if a.kind != SweepKind::Cts {
            return Err(usage("--relative applies to cts sweeps only"));
        }
        let c = design.network.resonator.c_ts;
        values.iter_mut().for_each(|v| *v *= c);
    }
    for v in &values {
        a.kind.check(*v).map_err(usage)?;
    }
    let freqs = cli.grid.unwrap_or(DEFAULT_GRID).frequencies();
    let spec = &design.spec;
    let result = sweep::run(&design.network, a.kind, &values, &freqs, spec.f_low, spec.f_high).map_err(fail)?;
    let prefix = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep"));
    let csv = with_suffix(&prefix, &format!(".{}.csv", a.kind));
    let summary = with_suffix(&prefix, &format!(".{}.summary.json", a.kind));
    write(&csv, &result.to_csv())?;
    let doc = json!({
        "kind": a.kind,
        "suppression_definition": SUPPRESSION_DEFINITION,
        "columns_db": "10*log10(G_T)",
        "curves": result.curves,
    });
    write(&summary, &(to_json(&doc) + "\n"))?;
    if cli.json {
        println!("{}", to_json(&doc));
    } else {
        for c in &result.curves {
            let m = &c.metrics;
            println!(
                "{}: IL {:.3} / {:.3} dB, notch {}, suppression {}",
                c.label,
                m.il_low,
                m.il_high,
                m.f_notch.map_or("none".into(), |f| format!("{:.3} GHz", f / 1e9)),
                m.suppression.map_or("none".into(), |s| format!("{s:.2} dB"))
            );
        }
        println!("wrote {} and {}", csv.display(), summary.display());
    }
    Ok(())
}

fn cmd_pz(cli: &Cli, a: &PzArgs) -> Result<(), Failure> {
    let r = match &a.design {
        Some(p) => read_design(p)?.network.resonator,
        None => {
            let need = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required without --design")));
            let (third_c, third_l) = match a.topology {
                Topology::III | Topology::IV => (need(a.cts1, "cts1")?, 0.0),
                Topology::I | Topology::II => (0.0, need(a.lts1, "lts1")?),
            };
            ResonatorSpec {
                topology: a.topology,
                l_ts: need(a.lts, "lts")?,
                c_ts: need(a.cts, "cts")?,
                c_ts1: third_c,
                l_ts1: third_l,
                q_t: Quality::IDEAL,
            }
        }
    };
    let pz = poles_zeros(&r);
    let hz = |v: &[f64]| v.iter().map(|w| w / (2.0 * std::f64::consts::PI)).collect::<Vec<_>>();
    let doc = json!({
        "topology": r.topology,
        "poles_rad_s": pz.poles,
        "zeros_rad_s": pz.zeros,
        "poles_hz": hz(&pz.poles),
        "zeros_hz": hz(&pz.zeros),
        "ordering": pz.ordering,
        "degenerate": pz.degenerate,
    });
    if cli.json {
        println!("{}", to_json(&doc));
    } else {
        println!("topology {:?}", r.topology);
        println!("poles (Hz): {:?}", hz(&pz.poles));
        println!("zeros (Hz): {:?}", hz(&pz.zeros));
        println!("ordering: {:?}{}", pz.ordering, if pz.degenerate { " (degenerate)" } else { "" });
    }
    Ok(())
}

fn cmd_check(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let n = read_netlist(path)?;
    let solver = AcSolver::new(&n).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let floating = solver.floating_nodes();
    if !floating.is_empty() {
        return Err(fail(format!("{}: floating nodes {floating:?}", path.display())));
    }
    let elements = n.elements().count();
    if cli.json {
        println!(
            "{}",
            to_json(&json!({
                "title": n.title,
                "elements": elements,
                "nodes": solver.node_names().len(),
                "ports": solver.port_refs().len(),
                "unknowns": solver.dimension(),
            }))
        );
    } else {
        println!(
            "ok: {elements} elements, {} nodes, {} ports, {} unknowns",
            solver.node_names().len(),
            solver.port_refs().len(),
            solver.dimension()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synthesize(a) => {
            if a.fl >= a.fh {
                Err(usage(format!("--fl ({}) must be below --fh ({})", a.fl, a.fh)))
            } else {
                cmd_synthesize(&cli, a)
            }
        }
        Command::Analyze(a) => cmd_analyze(&cli, a),
        Command::Sweep(a) => cmd_sweep(&cli, a),
        Command::Pz(a) => cmd_pz(&cli, a),
        Command::Check { netlist } => cmd_check(&cli, netlist),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
