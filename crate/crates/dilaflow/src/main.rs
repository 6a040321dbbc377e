//! `dilaflow`: trace, search and render the directional flow on dilation
//! surfaces given as glued polygon complexes.

use std::collections::BTreeMap;
use std::process::ExitCode;

use dilaflow::io::{self, SurfaceFile};
use dilaflow::render::{render, RenderSpec};
use dilaflow::report::{
    self, to_json_pretty, CrossingBoundJson, CylinderReport, DisconnectionJson,
    GeodesicScanReport, InfoReport, PencilJson, SweepJson, VeechReport,
};
use dilaflow_core::cylinder::{
    collect_cylinders, extend_to_cylinder, veech_criterion, ExtendConfig, VeechConfig,
};
use dilaflow_core::geodesics::closed_geodesics_in_direction;
use dilaflow_core::geom::DirectionAngle;
use dilaflow_core::horizon::{
    empirical_crossing_bound, is_disconnecting, max_crossing_pencil, HorizonConfig,
};
use dilaflow_core::saddle::{enumerate_saddle_connections, SaddleConfig, SaddleConnection};
use dilaflow_core::surface::Surface;
use dilaflow_core::sweep::{sweep, SweepConfig};
use dilaflow_core::trace::{trace, FlowPoint, TraceConfig};
use dilaflow_core::{build_dilation_cylinder, build_torus, build_two_chamber, TwoChamberParams};

const USAGE: &str = "\
dilaflow — directional flow on dilation surfaces

USAGE:
  dilaflow make <torus|cylinder|two-chamber> [--rho R] [--alpha A]
                [--ratio-a P] [--ratio-b Q] [--scale S] [-o FILE]
  dilaflow validate <FILE> [--json]
  dilaflow info <FILE> [--json]
  dilaflow trace <FILE> --polygon P --start X,Y --dir D
                 [--budget N] [--max-length L] [-o FILE]
  dilaflow geodesics <FILE> --dir D [--extend] [--json]
  dilaflow cylinders <FILE> [--veech] [--grid N] [--json]
  dilaflow horizon <FILE> (--list | --sc ID) [--max-length L] [--grid N]
                   [--budget N] [--pencil LO,HI] [--json]
  dilaflow sweep <FILE> --n N [--budget N] [--seed S] [--bins B]
                 [--no-refine] [--json]
  dilaflow render <FILE> [--trace DUMP] [--dir D] [--cylinder D] [--sc ID]
                  [--sweep REPORT] [--px SCALE] -o OUT.svg

FILE may be '-' for stdin; -o defaults to stdout.
Flag defaults: --rho 0.5, --alpha 1.0471975511965976 (π/3), --ratio-a 2,
--ratio-b 2, --scale 1, --budget 4096, --grid 360, --n 360, --seed 7,
--bins 100, --max-length 1.5 × surface scale, --px 160.
Exit status: 0 success, 1 domain error, 2 usage error.
";

struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
}

impl Args {
    fn parse(argv: &[String], boolean: &[&str]) -> Result<Args, String> {
        let mut positional = Vec::new();
        let mut flags = BTreeMap::new();
        let mut i = 0;
        while i < argv.len() {
            let a = &argv[i];
            if let Some(name) = a.strip_prefix("--") {
                if boolean.contains(&name) {
                    flags.insert(name.to_string(), "true".to_string());
                } else {
                    i += 1;
                    let value =
                        argv.get(i).ok_or_else(|| format!("--{name} expects a value"))?;
                    flags.insert(name.to_string(), value.clone());
                }
            } else if a == "-o" {
                i += 1;
                let value = argv.get(i).ok_or_else(|| "-o expects a value".to_string())?;
                flags.insert("o".to_string(), value.clone());
            } else {
                positional.push(a.clone());
            }
            i += 1;
        }
        Ok(Args { positional, flags })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.flags.get(name).map(|s| s.as_str())
    }

    fn f64_or(&self, name: &str, default: f64) -> Result<f64, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("--{name}: not a number: {v}")),
        }
    }

    fn usize_or(&self, name: &str, default: usize) -> Result<usize, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("--{name}: not an integer: {v}")),
        }
    }

    fn u64_or(&self, name: &str, default: u64) -> Result<u64, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("--{name}: not an integer: {v}")),
        }
    }

    fn pair(&self, name: &str) -> Result<Option<(f64, f64)>, String> {
        let Some(v) = self.get(name) else { return Ok(None) };
        let parts: Vec<&str> = v.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("--{name}: expected two comma-separated numbers, got {v}"));
        }
        let a = parts[0].parse().map_err(|_| format!("--{name}: not a number: {}", parts[0]))?;
        let b = parts[1].parse().map_err(|_| format!("--{name}: not a number: {}", parts[1]))?;
        Ok(Some((a, b)))
    }

    fn bool(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    fn out(&self) -> &str {
        self.get("o").unwrap_or("-")
    }
}

/// Usage errors exit 2; domain errors exit 1.
enum Failure {
    Usage(String),
    Domain(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn domain<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Domain(e.to_string()))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}\n\n{USAGE}");
            ExitCode::from(2)
        }
    }
}

fn run(argv: &[String]) -> Result<(), Failure> {
    let Some(cmd) = argv.first() else {
        return usage("missing subcommand");
    };
    let rest = &argv[1..];
    match cmd.as_str() {
        "make" => cmd_make(rest),
        "validate" => cmd_validate(rest),
        "info" => cmd_info(rest),
        "trace" => cmd_trace(rest),
        "geodesics" => cmd_geodesics(rest),
        "cylinders" => cmd_cylinders(rest),
        "horizon" => cmd_horizon(rest),
        "sweep" => cmd_sweep(rest),
        "render" => cmd_render(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => usage(format!("unknown subcommand: {other}")),
    }
}

fn load(args: &Args) -> Result<Surface, Failure> {
    let Some(path) = args.positional.first() else {
        return usage("missing surface file argument");
    };
    domain(io::read_surface(path))
}

fn emit(args: &Args, text: &str) -> Result<(), Failure> {
    domain(io::write_output(args.out(), text))
}

fn cmd_make(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &[]).map_err(Failure::Usage)?;
    let Some(kind) = args.positional.first() else {
        return usage("make: missing surface kind");
    };
    let surface = match kind.as_str() {
        "torus" => domain(build_torus())?,
        "cylinder" => {
            let rho = args.f64_or("rho", 0.5).map_err(Failure::Usage)?;
            let alpha =
                args.f64_or("alpha", std::f64::consts::FRAC_PI_3).map_err(Failure::Usage)?;
            domain(build_dilation_cylinder(rho, alpha))?
        }
        "two-chamber" => {
            let params = TwoChamberParams {
                ratio_a: args.f64_or("ratio-a", 2.0).map_err(Failure::Usage)?,
                ratio_b: args.f64_or("ratio-b", 2.0).map_err(Failure::Usage)?,
                scale: args.f64_or("scale", 1.0).map_err(Failure::Usage)?,
            };
            domain(build_two_chamber(params))?.surface
        }
        other => return usage(format!("make: unknown surface kind: {other}")),
    };
    emit(&args, &SurfaceFile::from_surface(&surface).to_canonical_json())
}

fn cmd_validate(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    if args.bool("json") {
        emit(&args, &to_json_pretty(&InfoReport::new(&surface)))
    } else {
        let mut out = format!(
            "ok: {} polygons, {} pairings, genus {}, {} boundary components\n",
            surface.polygons.len(),
            surface.pairings.len(),
            surface.genus,
            surface.boundary_components.len()
        );
        for w in &surface.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        emit(&args, &out)
    }
}

fn cmd_info(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let info = InfoReport::new(&surface);
    if args.bool("json") {
        return emit(&args, &to_json_pretty(&info));
    }
    let mut out = String::new();
    out.push_str(&format!("surface {}\n", info.surface_id));
    out.push_str(&format!(
        "polygons {}  pairings {}  genus {}  euler {}  boundary components {}\n",
        info.polygons, info.pairings, info.genus, info.euler_characteristic, info.boundary_components
    ));
    out.push_str(&format!(
        "index sum {} (2g-2 = {}): {}\n",
        info.index_sum,
        2 * info.genus as i64 - 2,
        if info.gauss_bonnet_ok { "consistent" } else { "INCONSISTENT" }
    ));
    out.push_str("singularities:\n");
    for s in &info.singularities {
        out.push_str(&format!(
            "  #{} {}{} cone {:.6} ratio {:.6}{}{}\n",
            s.id,
            s.kind,
            s.index.map_or(String::new(), |i| format!("(index {i})")),
            s.cone_angle,
            s.dilation_ratio,
            if s.marked { " marked" } else { "" },
            if s.on_boundary { " boundary" } else { "" },
        ));
    }
    for w in &info.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    emit(&args, &out)
}

fn cmd_trace(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let polygon = args.usize_or("polygon", 0).map_err(Failure::Usage)?;
    let Some((x, y)) = args.pair("start").map_err(Failure::Usage)? else {
        return usage("trace: --start X,Y is required");
    };
    let Some(dir) = args.get("dir") else {
        return usage("trace: --dir D is required");
    };
    let dir: f64 = dir.parse().map_err(|_| Failure::Usage(format!("--dir: not a number: {dir}")))?;
    let cfg = TraceConfig {
        max_crossings: args.usize_or("budget", 4096).map_err(Failure::Usage)?,
        max_path_length: args.f64_or("max-length", 1e12).map_err(Failure::Usage)?,
        ..TraceConfig::default()
    };
    let result = domain(trace(&surface, FlowPoint::new(polygon, x, y), DirectionAngle::new(dir), &cfg))?;
    emit(&args, &report::trace_dump(&result))
}

fn cmd_geodesics(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json", "extend"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let Some(dir) = args.get("dir") else {
        return usage("geodesics: --dir D is required");
    };
    let dir: f64 = dir.parse().map_err(|_| Failure::Usage(format!("--dir: not a number: {dir}")))?;
    let scan = closed_geodesics_in_direction(&surface, DirectionAngle::new(dir), &Default::default());
    if args.bool("extend") {
        let cylinders: Vec<CylinderReport> = scan
            .hyperbolic
            .iter()
            .filter_map(|g| extend_to_cylinder(&surface, g, &ExtendConfig::default()).ok())
            .map(|c| CylinderReport::new(&c))
            .collect();
        return emit(&args, &to_json_pretty(&cylinders));
    }
    let rep = GeodesicScanReport::new(dir, &scan);
    if args.bool("json") {
        emit(&args, &to_json_pretty(&rep))
    } else {
        let mut out = format!(
            "direction {dir}: {} hyperbolic, {} flat families\n",
            rep.hyperbolic.len(),
            rep.flat_families.len()
        );
        for g in &rep.hyperbolic {
            out.push_str(&format!(
                "  {} λ={:.9} dir={:.9} base=({},{})@{:.9} period {}\n",
                g.id, g.holonomy, g.direction, g.base_edge[0], g.base_edge[1], g.base_coord,
                g.signature.len()
            ));
        }
        emit(&args, &out)
    }
}

fn cmd_cylinders(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json", "veech"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let grid = args.usize_or("grid", 360).map_err(Failure::Usage)?;
    let cfg = VeechConfig { grid, ..Default::default() };
    if args.bool("veech") {
        let verdict = veech_criterion(&surface, &cfg);
        let rep = VeechReport::new(&verdict);
        if args.bool("json") {
            return emit(&args, &to_json_pretty(&rep));
        }
        let mut out = format!("verdict: {}\n", rep.verdict);
        if let Some(c) = &rep.cylinder {
            out.push_str(&format!(
                "  cylinder extent {:.9} rad (spans π: {}), core λ={:.9}\n",
                c.angular_extent, c.spans_pi, c.core.holonomy
            ));
        }
        if let Some(m) = rep.max_extent {
            out.push_str(&format!("  largest extent seen: {m:.9} rad\n"));
        }
        return emit(&args, &out);
    }
    let cylinders = collect_cylinders(&surface, &cfg);
    let reports: Vec<CylinderReport> = cylinders.iter().map(CylinderReport::new).collect();
    if args.bool("json") {
        emit(&args, &to_json_pretty(&reports))
    } else {
        let mut out = format!("{} maximal cylinders on a grid of {}\n", reports.len(), grid);
        for c in &reports {
            out.push_str(&format!(
                "  {} extent {:.9} rad over [{:.6}, {:.6}] λ={:.9} spans_pi={}\n",
                c.core.id,
                c.angular_extent,
                c.direction_interval[0],
                c.direction_interval[1],
                c.core.holonomy,
                c.spans_pi
            ));
        }
        emit(&args, &out)
    }
}

fn find_connection(
    surface: &Surface,
    id_prefix: &str,
    max_length: f64,
) -> Result<SaddleConnection, Failure> {
    if id_prefix.len() < 6 {
        return usage("--sc: give at least 6 hex digits of the connection id");
    }
    let found = enumerate_saddle_connections(surface, max_length, &SaddleConfig::default());
    let matches: Vec<&SaddleConnection> = found
        .iter()
        .filter(|c| report::hex_id(c.content_id()).starts_with(id_prefix))
        .collect();
    match matches.len() {
        0 => Err(Failure::Domain(format!(
            "no saddle connection with id {id_prefix} within length {max_length}; try --list"
        ))),
        1 => Ok(matches[0].clone()),
        n => Err(Failure::Domain(format!("id prefix {id_prefix} is ambiguous ({n} matches)"))),
    }
}

fn cmd_horizon(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json", "list"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let max_length =
        args.f64_or("max-length", 1.5 * surface.scale()).map_err(Failure::Usage)?;

    if args.bool("list") {
        let found = enumerate_saddle_connections(&surface, max_length, &SaddleConfig::default());
        let reports: Vec<report::SaddleConnectionReport> =
            found.iter().map(report::SaddleConnectionReport::new).collect();
        if args.bool("json") {
            return emit(&args, &to_json_pretty(&reports));
        }
        let mut out = format!("{} saddle connections within chart length {max_length}\n", found.len());
        for r in &reports {
            out.push_str(&format!(
                "  {} dir={:.9} len={:.9} {}→{} crossings {}\n",
                r.id, r.direction, r.chart_length, r.start_singularity, r.end_singularity, r.crossings
            ));
        }
        return emit(&args, &out);
    }

    let Some(id) = args.get("sc") else {
        return usage("horizon: pass --list or --sc ID");
    };
    let sc = find_connection(&surface, id, max_length)?;
    let disconnection = domain(is_disconnecting(&surface, &sc))?;

    let grid_n = args.usize_or("grid", 64).map_err(Failure::Usage)?;
    let budget = args.usize_or("budget", 4096).map_err(Failure::Usage)?;
    let cfg = HorizonConfig {
        trace: TraceConfig::with_max_crossings(budget),
        ..Default::default()
    };
    let grid: Vec<DirectionAngle> = (0..grid_n)
        .map(|i| DirectionAngle::new(std::f64::consts::TAU * (i as f64 + 0.37) / grid_n as f64))
        .collect();
    let bound = empirical_crossing_bound(&surface, &sc, &grid, &cfg);

    let pencil = match args.pair("pencil").map_err(Failure::Usage)? {
        Some((lo, hi)) => Some(domain(max_crossing_pencil(&surface, &sc, (lo, hi), &cfg))?),
        None => None,
    };

    #[derive(serde::Serialize)]
    struct HorizonOut {
        connection: report::SaddleConnectionReport,
        disconnection: DisconnectionJson,
        crossing_bound: CrossingBoundJson,
        #[serde(skip_serializing_if = "Option::is_none")]
        pencil: Option<PencilJson>,
    }
    let out = HorizonOut {
        connection: report::SaddleConnectionReport::new(&sc),
        disconnection: DisconnectionJson::new(&disconnection),
        crossing_bound: CrossingBoundJson::new(&bound),
        pencil: pencil.as_ref().map(PencilJson::new),
    };
    if args.bool("json") {
        emit(&args, &to_json_pretty(&out))
    } else {
        let mut text = format!(
            "connection {}: disconnecting={} components={}\n",
            out.connection.id, out.disconnection.disconnecting, out.disconnection.components
        );
        if let Some(k) = out.disconnection.certified_bound {
            text.push_str(&format!("  certified crossing bound: {k}\n"));
        }
        text.push_str(&format!(
            "  empirical max crossings {} over {} traces at budget {} (openness {})\n",
            out.crossing_bound.global_max,
            out.crossing_bound.traces_run,
            out.crossing_bound.budget_crossings,
            if out.crossing_bound.openness_ok { "ok" } else { "FAILED" }
        ));
        if let Some(p) = &out.pencil {
            text.push_str(&format!(
                "  pencil apex ({:.6},{:.6}) poly {} over [{:.6},{:.6}]{}\n",
                p.apex[0],
                p.apex[1],
                p.apex_polygon,
                p.interval[0],
                p.interval[1],
                if p.trivial { " (trivial: no crossings in the interval)" } else { "" }
            ));
        }
        emit(&args, &text)
    }
}

fn cmd_sweep(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &["json", "no-refine"]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let n = args.usize_or("n", 360).map_err(Failure::Usage)?;
    let cfg = SweepConfig {
        trace: TraceConfig::with_max_crossings(
            args.usize_or("budget", 4096).map_err(Failure::Usage)?,
        ),
        seed: args.u64_or("seed", 7).map_err(Failure::Usage)?,
        bins: args.usize_or("bins", 100).map_err(Failure::Usage)?,
        refine: !args.bool("no-refine"),
        ..Default::default()
    };
    let report = sweep(&surface, n, &cfg);
    let json = SweepJson::new(&report);
    if args.bool("json") {
        emit(&args, &to_json_pretty(&json))
    } else {
        emit(
            &args,
            &format!(
                "sweep n={} seed={} budget={}: morse-smale {}, saddle {}, boundary {}, unresolved {}\n\
                 bins with hyperbolic witnesses: {}/{}\n",
                json.n,
                json.seed,
                json.max_crossings,
                json.morse_smale,
                json.saddle_connection,
                json.boundary,
                json.unresolved,
                json.bins_with_hyperbolic,
                json.bins.len()
            ),
        )
    }
}

fn cmd_render(argv: &[String]) -> Result<(), Failure> {
    let args = Args::parse(argv, &[]).map_err(Failure::Usage)?;
    let surface = load(&args)?;
    let mut spec = RenderSpec::new(&surface);
    spec.scale = args.f64_or("px", 160.0).map_err(Failure::Usage)?;
    if let Some(dump) = args.get("trace") {
        let text = domain(io::read_input(dump))?;
        let parsed = domain(report::parse_trace_dump(&text))?;
        spec.traces.push(parsed);
    }
    if let Some(d) = args.get("dir") {
        let d: f64 = d.parse().map_err(|_| Failure::Usage(format!("--dir: not a number: {d}")))?;
        spec.geodesic_direction = Some(d);
    }
    if let Some(d) = args.get("cylinder") {
        let d: f64 =
            d.parse().map_err(|_| Failure::Usage(format!("--cylinder: not a number: {d}")))?;
        spec.cylinder_direction = Some(d);
    }
    if let Some(id) = args.get("sc") {
        let sc = find_connection(&surface, id, 1.5 * surface.scale())?;
        spec.connection = Some(sc);
    }
    if let Some(path) = args.get("sweep") {
        let text = domain(io::read_input(path))?;
        let json: SweepJson =
            serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("bad sweep report: {e}")))?;
        spec.sweep = Some(json);
    }
    let svg = render(&spec);
    emit(&args, &svg)
}
