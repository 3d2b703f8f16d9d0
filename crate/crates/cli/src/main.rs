use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cfwords_core::complexity::{directive_complexity, symbolic_bispecials, verify_dendric};
use cfwords_core::linear::cone_seminorm_table;
use cfwords_core::lyapunov::{
    balance_series_partial_sums, cylinder_frequency, estimate_exponents, invariant_cylinder, parse_cylinder, Measure,
    MeasureSampler,
};
use cfwords_core::mcfa::{
    barycentric_xy, classify_directive, cylinder_polygons, delta_directive, delta_expand, orbit_fc, pi_project,
    selmer_conjugacy_check, step_fs,
};
use cfwords_core::point::Real;
use cfwords_core::rauzy::{fmt17, generic_discrepancy_points, partial_sum_points, solve_beta, ColorMode};
use cfwords_core::subst::word_to_string;
use cfwords_core::words::{balance_profile, letter_frequencies, sadic_prefix, word_frequency};
use cfwords_core::{DirectiveWord, Error, FloatVector3, IntMatrix3, Point, RationalVector3, Result, WordPrefix};

/// Directive letters computed for `delta:` inputs.
const DELTA_MAX_LEN: usize = 1 << 16;

#[derive(Parser)]
#[command(name = "cfwords", version, about = "Cassaigne continued fractions and their S-adic words")]
struct Cli {
    /// Bits of precision for irrational inputs.
    #[arg(long, global = true, env = "CFWORDS_PRECISION", default_value_t = 256)]
    precision: u32,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Fc,
    Fs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arith {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit of a point under the Cassaigne map or semi-sorted Selmer.
    Orbit {
        #[arg(long, value_enum, default_value = "fc")]
        algo: Algo,
        /// Coordinates `a,b,c`; decimals, fractions, `e` and `pi` are accepted.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Arith,
    },
    /// Limit ray of the nested cones of a directive.
    Project {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = cfwords_core::mcfa::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = cfwords_core::mcfa::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// First letters of the directive of a point.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
    /// Prefix of the limit word of a directive.
    Word {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 40)]
        length: usize,
    },
    /// Letter frequencies of a prefix, and optionally of a factor.
    Frequencies {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 100_000)]
        length: usize,
        #[arg(long)]
        factor: Option<String>,
    },
    /// Letter discrepancy per window length, or the balance series with `--series`.
    Balance {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 100_000)]
        length: usize,
        #[arg(long, default_value_t = 1000)]
        window: usize,
        /// Emit the first N terms of the restricted-norm series instead.
        #[arg(long)]
        series: Option<usize>,
    },
    /// Factor complexity `p(n)`.
    Complexity {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
    },
    /// Bispecial factors found by symbolic descent.
    Bispecial {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 30)]
        maxlen: usize,
    },
    /// Dual-route dendricity check.
    Dendric {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 100)]
        maxlen: usize,
    },
    /// Boundary enumeration of the cone semi-norm.
    SeminormTable {
        /// A product such as `c1c2^3` (meaning `(C1C2)^3`) or rows `[1,1,0;0,0,1;0,1,0]`.
        #[arg(long)]
        matrix: String,
    },
    /// Cylinder triangles of the Cassaigne map.
    Cylinders {
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Lyapunov exponents of the cocycle.
    Lyapunov {
        /// `bernoulli:<p>` or `lebesgue`.
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[arg(long, default_value_t = 32)]
        traj: usize,
        #[arg(long, default_value_t = cfwords_core::lyapunov::DEFAULT_RENORM)]
        renorm: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Measure of a cylinder of directive sequences.
    Cylinder {
        /// `bernoulli:<p>`, `lebesgue` (ergodic averages) or `xi` (independent invariant draws).
        #[arg(long)]
        measure: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = 32)]
        traj: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Rauzy-fractal partial sums of the c1c2 fixed point.
    Rauzy {
        #[arg(long, default_value_t = 10_000)]
        length: usize,
        #[arg(long, default_value = "current")]
        mode: String,
    },
    /// Abelian discrepancy of a prefix against its frequency vector.
    Discrepancy {
        #[arg(long)]
        directive: String,
        #[arg(long, default_value_t = 10_000)]
        length: usize,
    },
    /// Exact check of the Cassaigne/Selmer conjugacy along an orbit.
    SelmerCheck {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 4)]
        steps: usize,
    },
    /// Rational dimension of the limit vector of an eventually periodic directive.
    Classify {
        #[arg(long, default_value = "")]
        pre: String,
        #[arg(long)]
        per: String,
    },
}

/// What a command produces, before formatting.
enum Output {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<String>>, footer: Option<String> },
    Json(Value),
    Text(String),
}

/// Effective settings echoed with every result.
struct Meta(Vec<(&'static str, String)>);

impl Meta {
    fn line(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# config: {}", parts.join(" "))
    }

    fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect())
    }
}

fn directive(input: &str, precision: u32) -> Result<DirectiveWord> {
    match input.strip_prefix("delta:") {
        Some(x) => delta_directive(&Point::parse(x, precision)?, DELTA_MAX_LEN),
        None => DirectiveWord::parse(input),
    }
}

fn parse_matrix(input: &str) -> Result<IntMatrix3> {
    let s = input.trim();
    if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
        let rows: Vec<Vec<i64>> = body
            .split(';')
            .map(|r| r.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad entry {t:?}")))).collect())
            .collect::<Result<_>>()?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(Error::Parse(format!("expected a 3x3 matrix, got {s:?}")));
        }
        return Ok(IntMatrix3::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j]))));
    }
    let (base, exp) = match s.split_once('^') {
        Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?),
        None => (s, 1),
    };
    let base = base.trim_start_matches('(').trim_end_matches(')');
    let mut letters = Vec::new();
    let mut rest = base;
    while !rest.is_empty() {
        rest = rest.trim_start_matches(['*', ' ']);
        let (l, tail) = if let Some(t) = rest.strip_prefix("c1").or_else(|| rest.strip_prefix("C1")) {
            (1, t)
        } else if let Some(t) = rest.strip_prefix("c2").or_else(|| rest.strip_prefix("C2")) {
            (2, t)
        } else {
            return Err(Error::Parse(format!("expected c1/c2 factors in {input:?}")));
        };
        letters.push(l);
        rest = tail;
    }
    if letters.is_empty() {
        return Err(Error::Parse(format!("empty matrix product {input:?}")));
    }
    Ok(IntMatrix3::product_of(&letters)?.pow(exp))
}

fn vec_str<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn sampler(input: &str, seed: u64) -> Result<MeasureSampler> {
    Ok(match input.parse::<Measure>()? {
        Measure::Bernoulli(p) => MeasureSampler::bernoulli(p, seed)?,
        Measure::Lebesgue => MeasureSampler::simplex_lebesgue(seed),
    })
}

fn run(cli: &Cli) -> Result<(Meta, Output)> {
    let precision = cli.precision;
    let mut meta = vec![("precision", precision.to_string())];
    let out = match &cli.command {
        Command::Orbit { algo, x, steps, mode } => {
            meta.push(("command", "orbit".into()));
            meta.push(("mode", if *mode == Arith::Exact { "exact" } else { "float" }.into()));
            let point = match mode {
                Arith::Exact => match Point::parse(x, precision)? {
                    p @ Point::Exact(_) => p,
                    Point::Float(_) => return Err(Error::Domain("exact mode needs rational coordinates".into())),
                },
                Arith::Float => {
                    let reals: Vec<Real> = x.split(',').map(str::parse).collect::<Result<_>>()?;
                    let reals: [Real; 3] =
                        reals.try_into().map_err(|_| Error::Parse(format!("expected three coordinates, got {x:?}")))?;
                    Point::Float(FloatVector3::from_reals(&reals, precision)?)
                }
            };
            let mut rows = Vec::with_capacity(steps + 1);
            match algo {
                Algo::Fc => {
                    let orbit = orbit_fc(&point, *steps)?;
                    for (k, s) in orbit.states.iter().enumerate() {
                        let coords: Vec<String> = match s {
                            Point::Exact(q) => q.0.iter().map(|c| c.to_string()).collect(),
                            Point::Float(v) => v.to_f64().iter().map(|&c| num(c)).collect(),
                        };
                        let branch = orbit.branches.get(k).map(|b| b.to_string()).unwrap_or_default();
                        rows.push([vec![k.to_string()], coords, vec![branch]].concat());
                    }
                }
                Algo::Fs => {
                    let Point::Exact(q) = point else {
                        return Err(Error::Domain("Selmer orbits are computed exactly only".into()));
                    };
                    let mut cur = q.0;
                    for k in 0..=*steps {
                        let coords: Vec<String> = cur.iter().map(|c| c.to_string()).collect();
                        if k == *steps || RationalVector3(cur.clone()).is_zero() {
                            rows.push([vec![k.to_string()], coords, vec![String::new()]].concat());
                            break;
                        }
                        let (next, b) = step_fs(&cur)?;
                        rows.push([vec![k.to_string()], coords, vec![b.to_string()]].concat());
                        cur = next;
                    }
                }
            }
            Output::Table { columns: vec!["step", "x1", "x2", "x3", "branch"], rows, footer: None }
        }
        Command::Project { directive: d, tol, max_steps } => {
            meta.push(("command", "project".into()));
            meta.push(("tol", num(*tol)));
            let w = directive(d, precision)?;
            let p = pi_project(&w, *tol, *max_steps)?;
            Output::Json(json!({
                "directive": w.to_string(),
                "f": p.f,
                "spread": p.spread,
                "converged": p.converged,
                "steps": p.steps,
            }))
        }
        Command::Expand { x, n } => {
            meta.push(("command", "expand".into()));
            let e = delta_expand(&Point::parse(x, precision)?, *n)?;
            Output::Json(json!({
                "letters": word_to_string(&e.letters),
                "collapse": e.collapse,
                "directive": e.directive().to_string(),
            }))
        }
        Command::Word { directive: d, length } => {
            meta.push(("command", "word".into()));
            Output::Text(sadic_prefix(&directive(d, precision)?, *length)?.to_string())
        }
        Command::Frequencies { directive: d, length, factor } => {
            meta.push(("command", "frequencies".into()));
            let p = sadic_prefix(&directive(d, precision)?, *length)?;
            let f = letter_frequencies(&p)?;
            let mut obj = json!({ "length": length, "f": f.0 });
            if let Some(u) = factor {
                let u = WordPrefix::parse(u)?;
                obj["factor"] = json!(u.to_string());
                obj["factor_frequency"] = json!(word_frequency(&p, u.letters())?);
            }
            Output::Json(obj)
        }
        Command::Balance { directive: d, length, window, series } => {
            meta.push(("command", "balance".into()));
            let w = directive(d, precision)?;
            if let Some(n_max) = series {
                let proj = pi_project(&w, cfwords_core::mcfa::DEFAULT_TOL, cfwords_core::mcfa::DEFAULT_MAX_STEPS)?;
                let s = balance_series_partial_sums(&w, &cfwords_core::words::FrequencyVector(proj.f), *n_max)?;
                let rows = (0..*n_max).map(|n| vec![n.to_string(), num(s.terms[n]), num(s.partial_sums[n])]).collect();
                Output::Table { columns: vec!["n", "term", "partial_sum"], rows, footer: None }
            } else {
                let p = sadic_prefix(&w, *length)?;
                let b = balance_profile(&p, *window)?;
                let mut rows = Vec::with_capacity(3 * window);
                for (k, row) in b.by_window.iter().enumerate() {
                    for (a, v) in row.iter().enumerate() {
                        rows.push(vec![(a + 1).to_string(), (k + 1).to_string(), v.to_string()]);
                    }
                }
                let footer = Some(format!("max {}", vec_str(&b.max)));
                Output::Table { columns: vec!["letter", "window", "discrepancy"], rows, footer }
            }
        }
        Command::Complexity { directive: d, nmax } => {
            meta.push(("command", "complexity".into()));
            let prof = directive_complexity(&directive(d, precision)?, *nmax)?;
            let rows = prof.iter().enumerate().map(|(n, c)| vec![n.to_string(), c.to_string()]).collect();
            Output::Table { columns: vec!["n", "p_n"], rows, footer: None }
        }
        Command::Bispecial { directive: d, maxlen } => {
            meta.push(("command", "bispecial".into()));
            let (depth, records) = symbolic_bispecials(&directive(d, precision)?, *maxlen)?;
            Output::Json(json!({ "depth": depth, "records": records }))
        }
        Command::Dendric { directive: d, maxlen } => {
            meta.push(("command", "dendric".into()));
            Output::Json(serde_json::to_value(verify_dendric(&directive(d, precision)?, *maxlen)?).expect("serializable"))
        }
        Command::SeminormTable { matrix } => {
            meta.push(("command", "seminorm-table".into()));
            let t = cone_seminorm_table(&parse_matrix(matrix)?)?;
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.u_label.clone(),
                        r.v_label.clone(),
                        vec_str(&r.z),
                        vec_str(&r.mt_z),
                        r.excluded.to_string(),
                        r.norm_d_z.as_ref().map(ToString::to_string).unwrap_or_default(),
                        r.norm_d_mt_z.as_ref().map(ToString::to_string).unwrap_or_default(),
                    ]
                })
                .collect();
            let footer = Some(format!("max {} at {}", t.value, vec_str(&t.witness)));
            Output::Table { columns: vec!["u", "v", "z", "Mt_z", "excluded", "normD_z", "normD_Mtz"], rows, footer }
        }
        Command::Cylinders { depth } => {
            meta.push(("command", "cylinders".into()));
            let rows = cylinder_polygons(*depth)?
                .iter()
                .map(|c| {
                    let mut row = vec![c.label.clone()];
                    for v in &c.vertices {
                        let [x, y] = barycentric_xy(v);
                        row.push(num(x));
                        row.push(num(y));
                    }
                    row
                })
                .collect();
            Output::Table { columns: vec!["label", "v1x", "v1y", "v2x", "v2y", "v3x", "v3y"], rows, footer: None }
        }
        Command::Lyapunov { measure, steps, traj, renorm, seed } => {
            meta.push(("command", "lyapunov".into()));
            meta.push(("seed", seed.to_string()));
            meta.push(("renorm", renorm.to_string()));
            let r = estimate_exponents(&sampler(measure, *seed)?, *steps, *traj, *renorm)?;
            Output::Json(serde_json::to_value(r).expect("serializable"))
        }
        Command::Cylinder { measure, word, samples, burn_in, traj, seed } => {
            meta.push(("command", "cylinder".into()));
            meta.push(("seed", seed.to_string()));
            let u = parse_cylinder(word)?;
            let est = if measure == "xi" {
                invariant_cylinder(&u, *samples, *seed)?
            } else {
                meta.push(("burn_in", burn_in.to_string()));
                meta.push(("traj", traj.to_string()));
                cylinder_frequency(&sampler(measure, *seed)?, &u, *burn_in, *samples, *traj)?
            };
            Output::Json(json!({ "measure": measure, "word": est.word, "estimate": est.estimate, "ci": est.ci, "samples": est.samples }))
        }
        Command::Rauzy { length, mode } => {
            meta.push(("command", "rauzy".into()));
            let mode: ColorMode = mode.parse()?;
            let ctx = solve_beta(precision.max(64))?;
            let p = sadic_prefix(&DirectiveWord::parse("(12)^w")?, *length + 1)?;
            let mut pts = partial_sum_points(&ctx, &p, mode)?;
            pts.truncate(*length);
            let rows = pts.iter().map(|q| vec![q.n.to_string(), fmt17(q.re), fmt17(q.im), q.letter.to_string()]).collect();
            Output::Table { columns: vec!["N", "re", "im", "letter"], rows, footer: None }
        }
        Command::Discrepancy { directive: d, length } => {
            meta.push(("command", "discrepancy".into()));
            let cloud = generic_discrepancy_points(&directive(d, precision)?, *length)?;
            let rows = cloud
                .points
                .iter()
                .map(|(n, v)| vec![n.to_string(), fmt17(v[0]), fmt17(v[1]), fmt17(v[2])])
                .collect();
            let footer = Some(format!("envelope {}", fmt17(cloud.envelope)));
            Output::Table { columns: vec!["N", "d1", "d2", "d3"], rows, footer }
        }
        Command::SelmerCheck { x, steps } => {
            meta.push(("command", "selmer-check".into()));
            let Point::Exact(q) = Point::parse(x, precision)? else {
                return Err(Error::Domain("the conjugacy check needs rational coordinates".into()));
            };
            let r = selmer_conjugacy_check(&q, *steps)?;
            Output::Json(json!({
                "holds": r.holds,
                "matrices_intertwine": r.matrices_intertwine,
                "fc_orbit": r.fc_orbit.iter().map(|v| vec_str(v)).collect::<Vec<_>>(),
                "fs_orbit": r.fs_orbit.iter().map(|v| vec_str(v)).collect::<Vec<_>>(),
                "fs_branches": r.fs_branches,
            }))
        }
        Command::Classify { pre, per } => {
            meta.push(("command", "classify".into()));
            let w = DirectiveWord::parse(&format!("pre:{pre} per:{per}"))?;
            Output::Text(classify_directive(&w)?.to_string())
        }
    };
    let format = match (cli.format, &out) {
        (Some(Format::Json), _) | (None, Output::Json(_)) => "json",
        (Some(Format::Csv), _) | (None, Output::Table { .. }) => "csv",
        (None, Output::Text(_)) => "text",
    };
    meta.push(("format", format.into()));
    Ok((Meta(meta), out))
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(cli: &Cli, meta: &Meta, out: Output) -> String {
    let mut s = String::new();
    match out {
        Output::Text(t) => {
            s.push_str(&t);
            s.push('\n');
        }
        Output::Table { columns, rows, footer } => {
            if cli.format == Some(Format::Json) {
                let rows: Vec<Value> = rows
                    .into_iter()
                    .map(|r| Value::Object(columns.iter().zip(r).map(|(c, v)| (c.to_string(), Value::String(v))).collect()))
                    .collect();
                let mut obj = Map::new();
                obj.insert("config".into(), meta.json());
                obj.insert("rows".into(), Value::Array(rows));
                if let Some(f) = footer {
                    obj.insert("footer".into(), Value::String(f));
                }
                s = serde_json::to_string_pretty(&Value::Object(obj)).expect("valid json");
                s.push('\n');
            } else {
                let _ = writeln!(s, "{}", meta.line());
                let _ = writeln!(s, "{}", columns.join(","));
                for r in rows {
                    let cells: Vec<String> = r.iter().map(|c| csv_cell(c)).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                if let Some(f) = footer {
                    let _ = writeln!(s, "# {f}");
                }
            }
        }
        Output::Json(v) => {
            if cli.format == Some(Format::Csv) {
                let _ = writeln!(s, "{}", meta.line());
                let _ = writeln!(s, "key,value");
                if let Value::Object(m) = &v {
                    for (k, x) in m {
                        let cell = match x {
                            Value::String(t) => t.clone(),
                            other => other.to_string(),
                        };
                        let _ = writeln!(s, "{},{}", csv_cell(k), csv_cell(&cell));
                    }
                }
            } else {
                let mut obj = match v {
                    Value::Object(m) => m,
                    other => Map::from_iter([("result".to_string(), other)]),
                };
                obj.insert("config".into(), meta.json());
                s = serde_json::to_string_pretty(&Value::Object(obj)).expect("valid json");
                s.push('\n');
            }
        }
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((meta, out)) => {
            if matches!(out, Output::Text(_)) && cli.format.is_none() {
                eprintln!("{}", meta.line());
            }
            print!("{}", render(&cli, &meta, out));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}
