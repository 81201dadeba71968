use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use exproj::bounds::{best_upper, closed_form_mismatches, verify_theorem1, BoundValue, Problem};
use exproj::brascamplieb::{bl_constant, lattice_closure, BLConfig};
use exproj::discretized::{
    broad_narrow, exceptional_scan, loglog_slope, random_cantor_set, st_grid_example, BroadNarrowParams, PointSet,
};
use exproj::lowerbounds::{admissible_grid, best_lower, explicit_region_value};
use exproj::ratmath::{int, to_f64, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{BlArgs, BoundsArgs, BroadNarrowArgs, Cli, Command, Format, RegionArgs, SimulateArgs, VerifyArgs};
use crate::svg;

/// Largest accepted region grid denominator.
pub const MAX_GRID: i64 = 400;
pub const MAX_VERIFY_N: i64 = 16;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or violated precondition; exit code 2.
    Usage(anyhow::Error),
    /// A check ran and did not pass; exit code 1.
    Check(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

/// Main output target: `--out` file or stdout.
fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("format {f:?} is not available for this command")))
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Bounds(a) => bounds(cli, a),
        Command::Region(a) => region(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::Bl(a) => bl(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Broadnarrow(a) => broadnarrow(cli, a),
    }
}

const SWEEP_HEADER: [&str; 13] =
    ["n", "k", "a", "s", "upper", "upper_source", "lower", "lower_source", "gap", "explicit", "a_f64", "s_f64", "gap_f64"];

struct Row {
    prob: Problem,
    a: Rational,
    s: Rational,
    upper: BoundValue,
    lower: BoundValue,
    explicit: Option<Rational>,
}

impl Row {
    fn compute(prob: &Problem, a: &Rational, s: &Rational) -> exproj::Result<Self> {
        Ok(Self {
            prob: *prob,
            a: a.clone(),
            s: s.clone(),
            upper: best_upper(prob, a, s)?,
            lower: best_lower(prob, a, s)?,
            explicit: explicit_region_value(prob, a, s),
        })
    }

    fn gap(&self) -> Rational {
        &self.upper.value - &self.lower.value
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.prob.n().to_string(),
            self.prob.k().to_string(),
            self.a.to_string(),
            self.s.to_string(),
            self.upper.value.to_string(),
            self.upper.source.to_string(),
            self.lower.value.to_string(),
            self.lower.source.to_string(),
            self.gap().to_string(),
            self.explicit.as_ref().map_or(String::new(), Rational::to_string),
            to_f64(&self.a).to_string(),
            to_f64(&self.s).to_string(),
            to_f64(&self.gap()).to_string(),
        ]
    }
}

fn bounds(cli: &Cli, args: &BoundsArgs) -> Outcome {
    let format = format_or(cli, Format::Text, &[Format::Text, Format::Csv])?;
    let prob = Problem::new(args.n, args.k)?;
    prob.check_as(&args.a, &args.s)?;
    let row = Row::compute(&prob, &args.a, &args.s)?;
    let mut out = sink(cli.out.as_deref())?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_HEADER)?;
            w.write_record(row.record())?;
            w.flush()?;
        }
        _ => {
            writeln!(out, "{prob} a={} s={}", args.a, args.s)?;
            writeln!(out, "upper {}", row.upper)?;
            writeln!(out, "lower {}", row.lower)?;
            writeln!(out, "gap {}", row.gap())?;
            if let Some(v) = &row.explicit {
                writeln!(out, "explicit region value {v}")?;
            }
        }
    }
    Ok(())
}

fn region(cli: &Cli, args: &RegionArgs) -> Outcome {
    let format = format_or(cli, Format::Csv, &[Format::Csv, Format::Svg, Format::Text])?;
    if !(1..=MAX_GRID).contains(&args.grid) {
        return Err(usage(format!("grid must be in [1, {MAX_GRID}], got {}", args.grid)));
    }
    let prob = Problem::new(args.n, args.k)?;
    let points = admissible_grid(&prob, args.grid);
    let rows = exproj_rows(&prob, &points)?;
    let max_gap = rows.iter().map(Row::gap).max().unwrap_or_else(|| int(0));
    let zero = rows.iter().filter(|r| r.gap() == int(0)).count();
    let summary = format!(
        "{prob} grid 1/{}: {} points, {} with zero gap, max gap {}",
        args.grid,
        rows.len(),
        zero,
        max_gap
    );
    let title = format!("gap = upper - lower, {prob}, grid 1/{}", args.grid);
    let cells = || -> Vec<svg::Cell> {
        rows.iter().map(|r| svg::Cell { a: r.a.clone(), s: r.s.clone(), gap: r.gap() }).collect()
    };
    let (a_max, s_max) = (prob.n() as f64, prob.k().min(prob.n()) as f64);
    let mut out = sink(cli.out.as_deref())?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_HEADER)?;
            for r in &rows {
                w.write_record(r.record())?;
            }
            w.flush()?;
            eprintln!("{summary}");
        }
        Format::Svg => out.write_all(svg::heatmap(&cells(), a_max, s_max, args.grid, &title).as_bytes())?,
        Format::Text => writeln!(out, "{summary}")?,
    }
    if let Some(path) = &args.svg {
        fs::write(path, svg::heatmap(&cells(), a_max, s_max, args.grid, &title))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn exproj_rows(prob: &Problem, points: &[(Rational, Rational)]) -> Result<Vec<Row>, Failure> {
    use rayon::prelude::*;
    let rows: exproj::Result<Vec<Row>> = points.par_iter().map(|(a, s)| Row::compute(prob, a, s)).collect();
    Ok(rows?)
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Outcome {
    let format = format_or(cli, Format::Text, &[Format::Text, Format::Csv])?;
    if !(2..=MAX_VERIFY_N).contains(&args.nmax) {
        return Err(usage(format!("nmax must be in [2, {MAX_VERIFY_N}], got {}", args.nmax)));
    }
    let mut out = sink(cli.out.as_deref())?;
    let mut failures = Vec::new();
    let mut csv_w = (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = csv_w.as_mut() {
        w.write_record(["n", "k", "inequality", "closed_form", "mismatches"])?;
    }
    for prob in Problem::all_up_to(args.nmax) {
        let ineq = verify_theorem1(&prob).pass();
        let mismatches = closed_form_mismatches(&prob);
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let ok = ineq && mismatches.is_empty();
        if !ok {
            failures.push(prob.to_string());
        }
        match csv_w.as_mut() {
            Some(w) => w.write_record([
                prob.n().to_string(),
                prob.k().to_string(),
                verdict(ineq).to_string(),
                verdict(mismatches.is_empty()).to_string(),
                mismatches.len().to_string(),
            ])?,
            None => writeln!(
                out,
                "{prob} {} (inequality {}, closed form {})",
                verdict(ok),
                verdict(ineq),
                verdict(mismatches.is_empty())
            )?,
        }
    }
    if let Some(w) = csv_w {
        out.write_all(&w.into_inner().map_err(|e| anyhow!(e.to_string()))?)?;
    }
    out.flush()?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("verification failed for {}", failures.join(", "))))
    }
}

fn bl(cli: &Cli, args: &BlArgs) -> Outcome {
    format_or(cli, Format::Text, &[Format::Text])?;
    let text =
        fs::read_to_string(&args.config).with_context(|| format!("cannot read {}", args.config.display()))?;
    let mut config = BLConfig::parse(&text)?;
    if let Some(p) = &args.p {
        config = config.with_p(p.clone())?;
    }
    let family = lattice_closure(config.ambient_dim(), config.subspaces(), args.cap)?;
    let value = bl_constant(&config, &family)?;
    let mut out = sink(cli.out.as_deref())?;
    writeln!(out, "{}, L = {}", value.value, value.critical)?;
    writeln!(out, "p = {}", config.p())?;
    writeln!(out, "candidates = {}", family.len())?;
    writeln!(out, "lower bound only = {}", value.lower_bound_only)?;
    writeln!(out, "truncated = {}", value.truncated)?;
    write!(out, "critical basis:\n{}", value.critical.to_text())?;
    Ok(())
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Outcome {
    let format = format_or(cli, Format::Csv, &[Format::Csv, Format::Text])?;
    let mut out = sink(cli.out.as_deref())?;
    let mut csv_w = (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = csv_w.as_mut() {
        w.write_record(["N", "slope", "count", "threshold", "is_exceptional"])?;
    }
    let mut summary = Vec::new();
    let mut samples = Vec::new();
    let mut broken = Vec::new();
    for &n in &args.n {
        let g = st_grid_example(n, &args.a, &args.s)?;
        let scan = exceptional_scan(&g, args.threshold)?;
        if let Some(w) = csv_w.as_mut() {
            for (k, c) in &scan.counts {
                w.write_record([
                    n.to_string(),
                    k.to_string(),
                    c.to_string(),
                    scan.threshold.to_string(),
                    (*c as f64 <= scan.threshold).to_string(),
                ])?;
            }
        }
        let max_on_e =
            scan.counts.iter().filter(|(k, _)| k.abs() <= g.slope_max).map(|(_, c)| *c).max().unwrap_or(0);
        let cap = 4 * g.y_max as u64 + 1;
        if max_on_e > cap {
            broken.push(format!("N={n}: max count on E {max_on_e} > {cap}"));
        }
        summary.push(format!(
            "N={n}: #A={} #E={} max count on E = {max_on_e} (cap {cap}), exceptional slopes = {} of {}",
            g.point_count(),
            g.slope_count(),
            scan.count(),
            scan.counts.len()
        ));
        if scan.count() > 0 {
            samples.push((n as f64, scan.count() as f64));
        }
    }
    if args.n.len() > 1 {
        match loglog_slope(&samples) {
            Ok(slope) => summary.push(format!("fitted exponent {slope:.4} (2s - a = {})", int(2) * &args.s - &args.a)),
            Err(e) => summary.push(format!("no fitted exponent: {e}")),
        }
    }
    match csv_w {
        Some(w) => {
            out.write_all(&w.into_inner().map_err(|e| anyhow!(e.to_string()))?)?;
            for line in &summary {
                eprintln!("{line}");
            }
        }
        None => {
            for line in &summary {
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()?;
    if broken.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(broken.join("; ")))
    }
}

fn broadnarrow(cli: &Cli, args: &BroadNarrowArgs) -> Outcome {
    format_or(cli, Format::Text, &[Format::Text])?;
    let set = match &args.points {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            PointSet::parse(&text)?
        }
        None => {
            let [k, keep, depth] = args.cantor[..] else {
                return Err(usage("--cantor needs K,keep,depth"));
            };
            let depth = u32::try_from(depth).map_err(|_| usage("depth too large"))?;
            random_cantor_set(k, keep, depth, &mut ChaCha8Rng::seed_from_u64(cli.seed))?
        }
    };
    let params = BroadNarrowParams {
        tau: args.tau.clone(),
        eps: args.eps.clone(),
        k: args.k,
        levels: args.levels,
        c0: args.c0,
    };
    let report = broad_narrow(&set, &params)?;
    let mut out = sink(cli.out.as_deref())?;
    writeln!(out, "points={} dim={} delta={}", set.len(), set.dim(), set.delta())?;
    write!(out, "{report}")?;
    out.flush()?;
    match &report.found {
        Some(f) if f.verified => Ok(()),
        Some(_) => Err(Failure::Check("returned cells failed the recount".into())),
        None => Err(Failure::Check(format!("no broad level within M={} levels", report.levels))),
    }
}
