//! `mcenter`: batch computations over finite metric spaces with exact
//! rational arithmetic. Each invocation ingests or generates one space,
//! runs one command, and emits a machine-readable JSON report.

mod report;

use clap::{Args, Parser, Subcommand};
use mcenter_core::rat::{parse_rational, Rat};
use mcenter_core::transport::{self, Measure};
use mcenter_core::{central, io, isometry, quotient, sampler, spaces, FiniteMetricSpace};
use report::{digest_str, error_payload, rational, rational_matrix, rational_vec, Report};
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "mcenter",
    about = "Chebyshev centers, central measures and canonical orderings of finite metric spaces, in exact rational arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock timing in the report (off by default so reports
    /// are byte-stable across reruns)
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms of a space and report basic attributes
    Validate(SpaceArgs),
    /// Enumerate the isometry group and its orbit partition
    Iso(SpaceArgs),
    /// Build the quotient space under the isometry group
    Quotient(SpaceArgs),
    /// Iterate the quotient tower and decide quasi-nilpotence
    Tower(SpaceArgs),
    /// Iterate the Chebyshev center tower of the point space
    Chebyshev(SpaceArgs),
    /// Kantorovich distance between two measures, with certificates
    Kantorovich {
        #[command(flatten)]
        space: SpaceArgs,
        /// First measure: comma-separated rational weights
        #[arg(long)]
        mu: String,
        /// Second measure: comma-separated rational weights
        #[arg(long)]
        nu: String,
    },
    /// Central measure: the generalized Chebyshev center of Prob(X)
    Central {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 16)]
        max_iter: usize,
    },
    /// Central measure of the second kind (quasi-nilpotent spaces)
    Lambda(SpaceArgs),
    /// Canonical metric, one representation, and the orbit sequence
    Canonical(SpaceArgs),
    /// Central measures of grid discretizations of [0,1] and their
    /// distance to uniform: an evidence stream, no asserted answer
    ExploreInterval {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 5)]
        to: usize,
        #[arg(long, default_value_t = 16)]
        max_iter: usize,
    },
}

#[derive(Args)]
struct SpaceArgs {
    /// Path to a .json or .csv space file
    #[arg(long, conflicts_with = "generator")]
    space: Option<PathBuf>,
    /// Generator kind: grid | cycle | equilateral | random | group
    #[arg(long = "gen", id = "generator")]
    generator: Option<String>,
    /// Generator parameters, comma-separated k=v (grid/cycle/equilateral/
    /// random take n=N; group takes file=PATH)
    #[arg(long, default_value = "")]
    params: String,
    /// Seed for the random generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Deserialize)]
struct GroupFile {
    table: Vec<Vec<usize>>,
    /// Pairs of (generator index, rational weight string)
    weights: Vec<(usize, String)>,
    labels: Option<Vec<String>>,
}

fn fail(command: &str, kind: &str, message: &str) -> ! {
    println!("{}", error_payload(command, kind, message));
    std::process::exit(1);
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate(_) => "validate",
        Command::Iso(_) => "iso",
        Command::Quotient(_) => "quotient",
        Command::Tower(_) => "tower",
        Command::Chebyshev(_) => "chebyshev",
        Command::Kantorovich { .. } => "kantorovich",
        Command::Central { .. } => "central",
        Command::Lambda(_) => "lambda",
        Command::Canonical(_) => "canonical",
        Command::ExploreInterval { .. } => "explore-interval",
    }
}

fn build_space(name: &str, args: &SpaceArgs) -> FiniteMetricSpace {
    if let Some(path) = &args.space {
        return match io::load_space(path) {
            Ok(s) => s,
            Err(e) => fail(name, "ingest", &e.to_string()),
        };
    }
    let Some(kind) = &args.generator else {
        fail(name, "usage", "either --space FILE or --gen KIND is required");
    };
    let params = parse_params(name, &args.params);
    let get_n = |what: &str| -> usize {
        match params.iter().find(|(k, _)| k == "n") {
            Some((_, v)) => match v.parse() {
                Ok(n) => n,
                Err(_) => fail(name, "params", &format!("{what}: n must be an integer")),
            },
            None => fail(name, "params", &format!("{what} needs n=N")),
        }
    };
    match kind.as_str() {
        "grid" => {
            let n = get_n("grid");
            if n < 1 {
                fail(name, "params", "grid needs n >= 1");
            }
            spaces::grid(n)
        }
        "cycle" => match spaces::cycle(get_n("cycle")) {
            Ok(s) => s,
            Err(e) => fail(name, "params", &e.to_string()),
        },
        "equilateral" => {
            let n = get_n("equilateral");
            if n < 1 {
                fail(name, "params", "equilateral needs n >= 1");
            }
            spaces::equilateral(n)
        }
        "random" => {
            let n = get_n("random");
            if n < 1 {
                fail(name, "params", "random needs n >= 1");
            }
            spaces::random_space(n, args.seed)
        }
        "group" => {
            let Some((_, path)) = params.iter().find(|(k, _)| k == "file") else {
                fail(name, "params", "group needs file=PATH (JSON with table and weights)");
            };
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => fail(name, "ingest", &e.to_string()),
            };
            let file: GroupFile = match serde_json::from_str(&text) {
                Ok(f) => f,
                Err(e) => fail(name, "ingest", &e.to_string()),
            };
            let mut weights: Vec<(usize, Rat)> = Vec::new();
            for (g, w) in &file.weights {
                match parse_rational(w) {
                    Ok(r) => weights.push((*g, r)),
                    Err(e) => fail(name, "params", &e.to_string()),
                }
            }
            match spaces::group_space(&file.table, &weights, file.labels) {
                Ok(s) => s,
                Err(e) => fail(name, "params", &e.to_string()),
            }
        }
        other => fail(
            name,
            "params",
            &format!("unknown generator `{other}` (expected grid|cycle|equilateral|random|group)"),
        ),
    }
}

fn parse_params(name: &str, text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for piece in text.split(',').filter(|p| !p.trim().is_empty()) {
        match piece.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
            None => fail(name, "params", &format!("bad parameter `{piece}`, expected k=v")),
        }
    }
    out
}

fn parse_measure(name: &str, text: &str, n: usize) -> Measure {
    let mut weights = Vec::new();
    for piece in text.split(',') {
        match parse_rational(piece) {
            Ok(r) => weights.push(r),
            Err(e) => fail(name, "measure", &e.to_string()),
        }
    }
    if weights.len() != n {
        fail(
            name,
            "measure",
            &format!("measure has {} weights, space has {n} points", weights.len()),
        );
    }
    match Measure::new(weights) {
        Ok(m) => m,
        Err(e) => fail(name, "measure", &e.to_string()),
    }
}

fn main() {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let (digest, payload, assertions) = run(name, &cli.command);
    let report = Report {
        command: name.to_string(),
        input_digest: digest,
        payload,
        assertions_passed: assertions,
        timing_ms: cli.timings.then(|| start.elapsed().as_millis()),
    };
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                fail(name, "io", &e.to_string());
            }
        }
        None => println!("{text}"),
    }
}

fn run(name: &str, command: &Command) -> (String, Value, Vec<String>) {
    match command {
        Command::Validate(args) => {
            let s = build_space(name, args);
            let payload = json!({
                "points": s.len(),
                "labels": s.labels(),
                "diameter": rational(&s.diameter()),
                "matrix": rational_matrix(s.matrix()),
            });
            (
                report::space_digest(&s),
                payload,
                vec!["metric axioms verified".into()],
            )
        }
        Command::Iso(args) => {
            let s = build_space(name, args);
            let group = isometry::enumerate_isometries(&s);
            let orbits = group.orbits();
            let mut assertions = vec!["group closure and completeness verified".into()];
            for x in 0..s.len() {
                assert_eq!(
                    orbits.orbits[orbits.orbit_of[x]].len() * group.stabilizer_size(x),
                    group.len()
                );
            }
            assertions.push("orbit-stabilizer identity verified".into());
            let payload = json!({
                "order": group.len(),
                "elements": group.elements().iter().map(|e| e.perm.clone()).collect::<Vec<_>>(),
                "orbits": orbits.orbits,
                "transitive": group.is_transitive(),
            });
            (report::space_digest(&s), payload, assertions)
        }
        Command::Quotient(args) => {
            let s = build_space(name, args);
            let q = quotient::quotient(&s);
            let mut assertions = vec![
                "projection nonexpansive".into(),
                "quotient metric positive off-diagonal".into(),
            ];
            for a in 0..q.space.len() {
                for b in 0..q.space.len() {
                    assert_eq!(&quotient::quotient_dual_distance(&q, a, b), q.space.dist(a, b));
                }
            }
            assertions.push("dual LP agrees with shortest-path closure on every orbit pair".into());
            let payload = json!({
                "orbit_count": q.space.len(),
                "orbits": q.partition.orbits,
                "projection": q.projection,
                "labels": q.space.labels(),
                "matrix": rational_matrix(q.space.matrix()),
            });
            (report::space_digest(&s), payload, assertions)
        }
        Command::Tower(args) => {
            let s = build_space(name, args);
            let t = quotient::quotient_tower(&s);
            for w in t.diameters.windows(2) {
                assert!(w[1] <= w[0]);
            }
            let payload = json!({
                "level_sizes": t.levels.iter().map(|l| l.len()).collect::<Vec<_>>(),
                "diameters": rational_vec(&t.diameters),
                "quasi_nilpotent": t.quasi_nilpotent,
                "terminal_labels": t.terminal().labels(),
            });
            (
                report::space_digest(&s),
                payload,
                vec!["tower diameters nonincreasing".into()],
            )
        }
        Command::Chebyshev(args) => {
            let s = build_space(name, args);
            let t = s.chebyshev_tower();
            for (k, level) in t.levels.iter().enumerate() {
                let d = s.diameter_of(level);
                assert!(t.radii[k] <= d && d <= Rat::from_integer(2.into()) * &t.radii[k]);
            }
            let payload = json!({
                "levels": t.levels,
                "level_labels": t.levels.iter().map(|l| {
                    l.iter().map(|&i| s.label(i).to_string()).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "radii": rational_vec(&t.radii),
                "stabilized": t.stabilized,
                "terminal_singleton": t.terminal_is_singleton(),
            });
            (
                report::space_digest(&s),
                payload,
                vec!["radius-diameter bounds on every level".into()],
            )
        }
        Command::Kantorovich { space, mu, nu } => {
            let s = build_space(name, space);
            let mu = parse_measure(name, mu, s.len());
            let nu = parse_measure(name, nu, s.len());
            let res = match transport::kantorovich(&s, &mu, &nu) {
                Ok(r) => r,
                Err(e) => fail(name, "transport", &e.to_string()),
            };
            let assertions = vec![
                "zero duality gap".into(),
                "coupling marginals verified".into(),
                "potential is 1-Lipschitz and normalized at index 0".into(),
            ];
            assert_eq!(res.plan.row_sums(), mu.weights());
            assert_eq!(res.plan.col_sums(), nu.weights());
            assert_eq!(res.plan.cost(&s), res.value);
            let payload = json!({
                "value": rational(&res.value),
                "plan": rational_matrix(&res.plan.matrix),
                "potential": rational_vec(&res.potential.values),
            });
            (report::space_digest(&s), payload, assertions)
        }
        Command::Central { space, max_iter } => {
            let s = build_space(name, space);
            let result = match central::central_measure(&s, *max_iter) {
                Ok(r) => r,
                Err(e) => fail(name, "central", &e.to_string()),
            };
            let mut assertions = vec!["level diameters nonincreasing".into()];
            for w in result.levels.windows(2) {
                assert!(w[1].w_diameter <= w[0].w_diameter);
            }
            if result.exact {
                let group = isometry::enumerate_isometries(&s);
                for phi in group.elements() {
                    let moved = transport::pushforward(&result.measure, &phi.perm, s.len())
                        .expect("permutation pushforward");
                    assert_eq!(&moved, &result.measure);
                }
                assertions.push("central measure invariant under every isometry".into());
            }
            let payload = json!({
                "measure": rational_vec(result.measure.weights()),
                "exact": result.exact,
                "residual_diameter": rational(&result.residual_diameter),
                "levels": result.levels.iter().map(|l| json!({
                    "vertex_count": l.vertices.len(),
                    "radius": rational(&l.radius),
                    "w_diameter": rational(&l.w_diameter),
                })).collect::<Vec<_>>(),
            });
            (report::space_digest(&s), payload, assertions)
        }
        Command::Lambda(args) => {
            let s = build_space(name, args);
            let measure = match central::lambda_measure(&s) {
                Ok(m) => m,
                Err(e) => fail(name, "lambda", &e.to_string()),
            };
            let group = isometry::enumerate_isometries(&s);
            for phi in group.elements() {
                let moved = transport::pushforward(&measure, &phi.perm, s.len())
                    .expect("permutation pushforward");
                assert_eq!(&moved, &measure);
            }
            let payload = json!({
                "measure": rational_vec(measure.weights()),
            });
            (
                report::space_digest(&s),
                payload,
                vec![
                    "space is quasi-nilpotent".into(),
                    "lambda invariant under every isometry".into(),
                ],
            )
        }
        Command::Canonical(args) => {
            let s = build_space(name, args);
            let order = match sampler::canonical_metric(&s) {
                Ok(o) => o,
                Err(e) => fail(name, "canonical", &e.to_string()),
            };
            let reps = sampler::representations(&s, &order);
            let group = isometry::enumerate_isometries(&s);
            assert_eq!(reps.len(), group.len());
            let sequence = match sampler::canonical_orbit_sequence(&s) {
                Ok(seq) => seq,
                Err(e) => fail(name, "canonical", &e.to_string()),
            };
            let payload = json!({
                "rho": rational_matrix(&order.rho),
                "representation": order.representation,
                "representation_count": order.all_representations_count,
                "orbit_sequence": sequence,
            });
            (
                report::space_digest(&s),
                payload,
                vec![
                    "new-row independence held at every step".into(),
                    "representation count equals isometry group order".into(),
                    "orbit sequence independent of the representation".into(),
                ],
            )
        }
        Command::ExploreInterval { from, to, max_iter } => {
            if from > to || *from < 2 {
                fail(name, "params", "explore-interval needs 2 <= from <= to");
            }
            let mut results = Vec::new();
            for n in *from..=*to {
                let s = spaces::grid(n);
                let result = match central::central_measure(&s, *max_iter) {
                    Ok(r) => r,
                    Err(e) => fail(name, "central", &e.to_string()),
                };
                let uniform = Measure::uniform(n);
                let w = match transport::kantorovich_distance(&s, &result.measure, &uniform) {
                    Ok(w) => w,
                    Err(e) => fail(name, "transport", &e.to_string()),
                };
                results.push(json!({
                    "n": n,
                    "measure": rational_vec(result.measure.weights()),
                    "exact": result.exact,
                    "w_to_uniform": rational(&w),
                    "residual_diameter": rational(&result.residual_diameter),
                }));
            }
            let payload = json!({
                "note": "evidence, not proof",
                "results": results,
            });
            let digest = digest_str(&format!("explore-interval:{from}..{to}:{max_iter}"));
            (
                digest,
                payload,
                vec!["all reported values are exact rationals".into()],
            )
        }
    }
}
