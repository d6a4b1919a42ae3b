use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use digitgap::fy::{
    certify_common_integer, find_alignment, gauge, solve_threshold_m, AlignmentProblem, CertifyOptions, Verdict,
};
use digitgap::gaussian::{
    central_digit, enumerate_representable, gauss_alignment, gauss_expand, gauss_search_common, level_cells,
    render_file, residue_system, validate_digit_system, Figure, GaussianDigitSystem, GaussianInt, ImageSpec,
    Outcome, Termination,
};
use digitgap::numeric::{format_rational, int, parse_rational, MAX_BITS};
use digitgap::search::{count_common, search_common, SearchQuery, Strategy};
use digitgap::thickness::{level_set, thickness_exact, thickness_formula, LevelSetSpec};
use digitgap::{avoids, expand_nat, Error, MissingDigitSpec, Result, Thickness};

use crate::report::PRECISION_ENV;

#[derive(Parser, Debug)]
#[command(name = "digitgap", version, about = "Missing-digit sets: thickness, certificates and searches")]
pub struct Cli {
    /// Print the full JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Starting precision in bits for enclosure-based comparisons.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 128,
          value_parser = clap::value_parser!(u32).range(16..=MAX_BITS as i64))]
    pub precision_bits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Digits of N in base B, most significant first.
    Expand {
        #[arg(long)]
        base: u64,
        n: BigUint,
    },
    /// Whether N avoids the missing digits in base B.
    Avoid {
        #[arg(long)]
        base: u64,
        #[arg(long, default_value = "")]
        missing: String,
        n: BigUint,
    },
    /// Integers avoiding the missing digits in every base.
    Search {
        #[arg(long)]
        bases: String,
        /// Missing digits per base, groups separated by ';'. One group
        /// applies to every base.
        #[arg(long)]
        missing: String,
        #[arg(long)]
        first: Option<usize>,
        #[arg(long)]
        bound: Option<BigUint>,
        /// Count the solutions up to the bound instead of listing them.
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Exact thickness of a level set.
    Thickness(LevelArgs),
    /// The intervals of a level set.
    Levelset(LevelArgs),
    /// Smallest base threshold M for k sets.
    #[command(name = "bound-M")]
    BoundM {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "1")]
        r: String,
    },
    /// Smallest n with n log_{b_i} b_1 near an integer for every base.
    Align {
        #[arg(long)]
        bases: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
    },
    /// Certify a common integer with restricted digits in several bases.
    Certify {
        #[arg(long)]
        bases: String,
        #[arg(long)]
        missing: String,
        #[arg(long)]
        eps: Option<String>,
        /// Use this alignment instead of searching for one.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
        /// Also look for an explicit integer in the common window.
        #[arg(long)]
        witness: bool,
    },
    /// Canonical digit system of a Gaussian base, or check a digit set.
    GaussDigits {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        check: Option<String>,
    },
    /// Expansion of a Gaussian integer.
    GaussExpand {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        digits: Option<String>,
        #[arg(long, value_enum, default_value_t = PolicyArg::ZeroOrUnit)]
        policy: PolicyArg,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Smallest exponents with b1^l1 / b2^l2 close to 1.
    GaussAlign {
        #[arg(long, allow_hyphen_values = true)]
        bases: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 64)]
        max: u32,
    },
    /// Gaussian integers avoiding one digit in each of two bases.
    GaussSearch {
        #[arg(long, allow_hyphen_values = true)]
        bases: String,
        #[arg(long, allow_hyphen_values = true)]
        missing: String,
        #[arg(long, default_value_t = 6)]
        max_digits: u32,
    },
    /// Draw level cells or representable points to SVG or PPM.
    Render {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        digits: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        missing: Option<String>,
        #[arg(long, default_value_t = 3)]
        level: u32,
        /// Draw the integers with at most this many digits instead of cells.
        #[arg(long)]
        points: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "512x512")]
        size: String,
        /// One color for everything.
        #[arg(long)]
        mono: bool,
    },
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[arg(long)]
    base: u64,
    #[arg(long, default_value = "")]
    missing: String,
    #[arg(long)]
    depth: u32,
    /// Multiply the set by base^scale.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    scale: i64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum StrategyArg {
    Auto,
    Filter,
    Cover,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PolicyArg {
    ZeroOrUnit,
    ZeroOnly,
}

pub enum Status {
    Ok,
    /// A well-formed run with a negative answer (exit code 2).
    Negative(String),
}

pub struct Output {
    pub inputs: Value,
    pub outputs: Value,
    pub text: String,
    pub status: Status,
}

impl Output {
    fn ok(inputs: Value, outputs: Value, text: String) -> Self {
        Output { inputs, outputs, text, status: Status::Ok }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad(format!("not an integer: {t:?}")))).collect()
}

/// `"0,3;0"` to one spec per base; a single group is shared by every base.
fn parse_specs(bases: &[u64], missing: &str) -> Result<Vec<MissingDigitSpec>> {
    let groups: Vec<&str> = missing.split(';').collect();
    if groups.len() != 1 && groups.len() != bases.len() {
        return Err(bad(format!("{} bases but {} missing-digit groups", bases.len(), groups.len())));
    }
    bases
        .iter()
        .enumerate()
        .map(|(i, &b)| MissingDigitSpec::new(b, parse_u64_list(groups[if groups.len() == 1 { 0 } else { i }])?))
        .collect()
}

fn parse_gauss(s: &str) -> Result<GaussianInt> {
    s.trim().parse().map_err(|_| bad(format!("not a Gaussian integer: {s:?}")))
}

fn parse_gauss_list(s: &str) -> Result<Vec<GaussianInt>> {
    s.split(',').map(parse_gauss).collect()
}

fn gauss_system(base: &str, digits: Option<&str>) -> Result<GaussianDigitSystem> {
    let b = parse_gauss(base)?;
    match digits {
        Some(d) => GaussianDigitSystem::new(b, parse_gauss_list(d)?),
        None => residue_system(&b),
    }
}

fn spec_json(s: &MissingDigitSpec) -> Value {
    json!({ "base": s.base(), "missing": s.missing() })
}

fn msf(n: &BigUint, base: u64) -> Result<String> {
    Ok(expand_nat(n, base)?.to_msf_string())
}

fn thickness_str(t: &Thickness) -> String {
    match t {
        Thickness::Finite(r) => format_rational(r),
        Thickness::Infinite => "inf".into(),
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("plain data")
}

pub fn run(cli: &Cli) -> Result<Output> {
    let bits = cli.precision_bits;
    match &cli.command {
        Command::Expand { base, n } => {
            let d = expand_nat(n, *base)?;
            let s = d.to_msf_string();
            Ok(Output::ok(
                json!({ "base": base, "n": n.to_string() }),
                json!({ "digits": d.digits().iter().rev().collect::<Vec<_>>(), "string": s }),
                format!("{s}\n"),
            ))
        }
        Command::Avoid { base, missing, n } => {
            let spec = MissingDigitSpec::new(*base, parse_u64_list(missing)?)?;
            let yes = avoids(n, &spec);
            Ok(Output::ok(
                json!({ "n": n.to_string(), "spec": spec_json(&spec) }),
                json!({ "avoids": yes, "digits": msf(n, *base)? }),
                format!("{yes}\n"),
            ))
        }
        Command::Search { bases, missing, first, bound, count, strategy } => {
            let specs = parse_specs(&parse_u64_list(bases)?, missing)?;
            let strategy = match strategy {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Filter => Strategy::Filter,
                StrategyArg::Cover => Strategy::CoverIntersection,
            };
            let inputs = json!({
                "specs": specs.iter().map(spec_json).collect::<Vec<_>>(),
                "first": first,
                "bound": bound.as_ref().map(ToString::to_string),
                "count": count,
                "strategy": format!("{strategy:?}"),
            });
            if *count {
                let bound = bound.clone().ok_or_else(|| bad("--count needs --bound"))?;
                let q = SearchQuery::new(specs, Some(bound), None)?.with_strategy(strategy);
                let c = count_common(&q)?;
                return Ok(Output::ok(inputs, json!({ "count": c }), format!("{c}\n")));
            }
            let q = SearchQuery::new(specs.clone(), bound.clone(), *first)?.with_strategy(strategy);
            let found = search_common(&q)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for n in &found {
                let mut expansions = serde_json::Map::new();
                let mut line = n.to_string();
                for s in &specs {
                    let e = msf(n, s.base())?;
                    line += &format!("  [{}]{e}", s.base());
                    expansions.insert(s.base().to_string(), Value::String(e));
                }
                text += &line;
                text.push('\n');
                rows.push(json!({ "value": n.to_string(), "expansions": expansions }));
            }
            Ok(Output::ok(inputs, json!({ "found": rows.len(), "witnesses": rows }), text))
        }
        Command::Thickness(a) | Command::Levelset(a) => {
            let spec = MissingDigitSpec::new(a.base, parse_u64_list(&a.missing)?)?;
            let u = level_set(&LevelSetSpec::new(spec.clone(), a.scale, a.depth)?)?;
            let inputs = json!({ "spec": spec_json(&spec), "depth": a.depth, "scale": a.scale });
            if matches!(cli.command, Command::Levelset(_)) {
                let text = u.parts().iter().map(|p| format!("[{}, {}]\n", format_rational(p.lo()), format_rational(p.hi()))).collect();
                return Ok(Output::ok(inputs, json!({ "intervals": to_value(&u), "count": u.len() }), text));
            }
            let t = thickness_exact(&u)?;
            // The closed form is scale-free, so it is comparable at any scale.
            let formula = thickness_formula(&spec).ok().map(|f| format_rational(&f.value));
            Ok(Output::ok(
                inputs,
                json!({ "thickness": thickness_str(&t), "intervals": u.len(), "closed_form": formula }),
                format!("{}\n", thickness_str(&t)),
            ))
        }
        Command::BoundM { k, r } => {
            let r = parse_rational(r)?;
            let mut t = solve_threshold_m(*k, &r)?;
            t.gauge_at_m = gauge(*k, &(&r * int(t.m - 2)), bits)?;
            if t.gauge_below.is_some() {
                t.gauge_below = Some(gauge(*k, &(&r * int(t.m - 3)), bits)?);
            }
            let text = format!("M* = {}\n", t.m);
            Ok(Output::ok(json!({ "k": k, "r": format_rational(&r) }), to_value(&t), text))
        }
        Command::Align { bases, eps, max } => {
            let mut bases = parse_u64_list(bases)?;
            bases.sort_unstable();
            let eps = parse_rational(eps)?;
            let inputs = json!({ "bases": bases, "eps": format_rational(&eps), "max": max });
            let p = AlignmentProblem::new(bases, eps, *max)?;
            match find_alignment(&p) {
                Ok(a) => {
                    let text = format!("n = {}, exponents {:?}\n", a.n, a.exponents);
                    Ok(Output::ok(inputs, json!({ "found": true, "alignment": to_value(&a) }), text))
                }
                Err(Error::AlignmentNotFound(n)) => Ok(Output {
                    inputs,
                    outputs: json!({ "found": false }),
                    text: format!("no alignment with n <= {n}\n"),
                    status: Status::Negative(format!("no alignment with n <= {n}")),
                }),
                Err(e) => Err(e),
            }
        }
        Command::Certify { bases, missing, eps, n, max, witness } => {
            let specs = parse_specs(&parse_u64_list(bases)?, missing)?;
            let eps = eps.as_deref().map(parse_rational).transpose()?;
            let opts = CertifyOptions { eps, n: *n, n_max: *max, witness: *witness, bits, ..Default::default() };
            let inputs = json!({ "specs": specs.iter().map(spec_json).collect::<Vec<_>>(), "options": to_value(&opts) });
            let cert = certify_common_integer(&specs, &opts)?;
            let mut text = format!("verdict: {:?}\n", cert.verdict);
            if let Some(a) = &cert.alignment {
                text += &format!("n = {}, exponents {:?}\n", a.n, a.exponents);
            }
            if let Some(w) = &cert.witness {
                text += &format!("witness: {}\n", w.value);
            }
            let status = match cert.verdict {
                Verdict::Pass => Status::Ok,
                Verdict::Fail => {
                    let why = cert.failed_condition.clone().unwrap_or_else(|| "unspecified".into());
                    text += &format!("failed: {why}\n");
                    Status::Negative(format!("certificate failed: {why}"))
                }
            };
            Ok(Output { inputs, outputs: to_value(&cert), text, status })
        }
        Command::GaussDigits { base, check } => {
            let b = parse_gauss(base)?;
            if let Some(c) = check {
                let d = parse_gauss_list(c)?;
                let ok = validate_digit_system(&b, &d);
                return Ok(Output::ok(
                    json!({ "base": b, "digits": d }),
                    json!({ "valid": ok }),
                    format!("{ok}\n"),
                ));
            }
            let sys = residue_system(&b)?;
            let names: Vec<String> = sys.digits.iter().map(ToString::to_string).collect();
            Ok(Output::ok(
                json!({ "base": b }),
                json!({ "norm": sys.norm().to_string(), "digits": names, "central": central_digit(&sys) }),
                format!("{}\n", names.join(" ")),
            ))
        }
        Command::GaussExpand { base, digits, policy, z } => {
            let sys = gauss_system(base, digits.as_deref())?;
            let z = parse_gauss(z)?;
            let policy = match policy {
                PolicyArg::ZeroOrUnit => Termination::ZeroOrUnit,
                PolicyArg::ZeroOnly => Termination::ZeroOnly,
            };
            let e = gauss_expand(&z, &sys, policy);
            let text = match &e.outcome {
                Outcome::Terminated { u } => format!(
                    "u = {u}, k = {}, digits (most significant first): {}\n",
                    e.k(),
                    e.digits.iter().rev().map(ToString::to_string).collect::<Vec<_>>().join(" ")
                ),
                Outcome::Cycle { start, period } => format!("cycle of period {period} after {start} steps\n"),
            };
            Ok(Output::ok(
                json!({ "base": sys.base, "digits": sys.digits, "policy": format!("{policy:?}"), "z": z }),
                to_value(&e),
                text,
            ))
        }
        Command::GaussAlign { bases, eps, max } => {
            let b = parse_gauss_list(bases)?;
            if b.len() != 2 {
                return Err(bad("exactly two bases are required"));
            }
            let eps = parse_rational(eps)?;
            let a = gauss_alignment(&b[0], &b[1], &eps, *max)?;
            Ok(Output::ok(
                json!({ "bases": b, "eps": format_rational(&eps), "max": max }),
                to_value(&a),
                format!("l1 = {}, l2 = {}\n", a.l1, a.l2),
            ))
        }
        Command::GaussSearch { bases, missing, max_digits } => {
            let b = parse_gauss_list(bases)?;
            let m = missing.split(';').map(parse_gauss).collect::<Result<Vec<_>>>()?;
            if b.len() != 2 || m.len() != 2 {
                return Err(bad("two bases and two missing digits are required"));
            }
            let s1 = residue_system(&b[0])?;
            let s2 = residue_system(&b[1])?;
            let out = gauss_search_common(&s1, &s2, &m[0], &m[1], *max_digits)?;
            let names: Vec<String> = out.iter().map(ToString::to_string).collect();
            Ok(Output::ok(
                json!({ "bases": b, "missing": m, "max_digits": max_digits }),
                json!({ "found": out.len(), "values": names }),
                names.iter().map(|s| format!("{s}\n")).collect(),
            ))
        }
        Command::Render { base, digits, missing, level, points, out, size, mono } => {
            let sys = gauss_system(base, digits.as_deref())?;
            let mut d = sys.digits.clone();
            if let Some(m) = missing {
                let m = parse_gauss(m)?;
                if sys.index_of(&m).is_none() {
                    return Err(bad(format!("{m} is not a digit")));
                }
                d.retain(|x| *x != m);
            }
            let (w, h) = size.split_once('x').ok_or_else(|| bad("size must look like 512x512"))?;
            let spec = ImageSpec {
                width: w.parse().map_err(|_| bad("bad width"))?,
                height: h.parse().map_err(|_| bad("bad height"))?,
                color_by_digit: !mono,
            };
            let fig = match points {
                Some(k) => Figure::from_points(&enumerate_representable(&sys, &d, *k)?),
                None => Figure::from_cells(&level_cells(&sys, &d, *level)?, &sys),
            };
            render_file(out, &fig, &spec)?;
            let kind = if points.is_some() { "points" } else { "cells" };
            Ok(Output::ok(
                json!({
                    "base": sys.base, "digits": d, "level": level, "points": points,
                    "out": out.display().to_string(), "size": size, "mono": mono,
                }),
                json!({ "file": out.display().to_string(), "kind": kind, "items": fig.len() }),
                format!("wrote {} {kind} to {}\n", fig.len(), out.display()),
            ))
        }
    }
}
