use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use learnspace::adaptation::{add_state, remove_state, space_fringe, Adapted};
use learnspace::assessment::{run_projection_assessment, AssessmentConfig, ResponseModel};
use learnspace::base_dimension::{enumerate_basic_words, DimensionReport};
use learnspace::fibers::{fiber, join, recognize_upper_subfamily, GeneratorFamily};
use learnspace::formats::{parse_semilattice, parse_space, parse_states, write_hasse, write_seqs, write_space, write_states, Format};
use learnspace::{collect_family, AnySpace, Domain, LearningSpace, SequenceSpace, State};
use learnspace_service::ServiceConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{AssessArgs, Cli, Command, EditArgs, SemilatticeArgs};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        self.code
    }

    fn validation(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 1 }
    }

    fn in_file(path: &Path) -> impl FnOnce(learnspace::Error) -> CliError + '_ {
        move |e| CliError { message: format!("{}: {e}", path.display()), code: e.exit_code() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<learnspace::Error> for CliError {
    fn from(e: learnspace::Error) -> Self {
        Self { message: e.to_string(), code: e.exit_code() }
    }
}

pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    fn new(command: &str, text: String, mut json: Value) -> Self {
        if let Value::Object(m) = &mut json {
            m.insert("schema_version".into(), SCHEMA_VERSION.into());
            m.insert("command".into(), command.into());
        }
        Self { text, json }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<AnySpace> {
    let format = Format::from_path(path)?;
    parse_space(&read(path)?, format).map_err(CliError::in_file(path))
}

fn labels(d: &Domain, s: &State) -> Vec<String> {
    s.iter().map(|x| d.label(x).to_string()).collect()
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

fn parse_concepts(d: &Domain, text: &str) -> Result<State> {
    Ok(d.parse_state(text)?)
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::States { input, list } => states(input, *list),
        Command::Base { input } => base(input),
        Command::Minimize { input, output } => minimize(input, output.as_deref()),
        Command::Dims { input } => dims(input),
        Command::Project { input, keep } => project(input, keep),
        Command::Fringe { input, state } => fringe(input, state),
        Command::FringeSpace { input } => fringe_space(input),
        Command::AddState(a) => edit("add-state", a, add_state),
        Command::RemoveState(a) => edit("remove-state", a, remove_state),
        Command::BasicWords { input, limit } => basic_words(input, *limit),
        Command::Assess(a) => assess(a),
        Command::Fiber { input, know, unknow } => fiber_cmd(input, know, unknow),
        Command::RecognizeUpper { input } => recognize(input),
        Command::Join { a, b } => join_cmd(a, b),
        Command::Semilattice(a) => semilattice(a),
        Command::Serve { port, host, persist, static_dir } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| CliError::validation(format!("bad address {host}:{port}: {e}")))?;
            let config = ServiceConfig { persist: persist.clone(), static_dir: static_dir.clone(), ..Default::default() };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::validation(e.to_string()))?;
            rt.block_on(learnspace_service::serve(addr, config)).map_err(|e| CliError::validation(e.to_string()))?;
            Ok(Output::new("serve", String::new(), json!({})))
        }
    }
}

fn states(input: &Path, list: bool) -> Result<Output> {
    let sp = load(input)?;
    let count = sp.count();
    let mut text = format!("{count}\n");
    let mut j = json!({ "count": count });
    if list {
        let fam = collect_family(&sp)?;
        let d = sp.domain();
        text.push_str(&lines(fam.sorted().iter().map(|s| d.format_state(s))));
        j["states"] = fam.sorted().iter().map(|s| labels(d, s)).collect::<Vec<_>>().into();
    }
    Ok(Output::new("states", text, j))
}

fn base(input: &Path) -> Result<Output> {
    let sp = load(input)?;
    let b = sp.base()?;
    let mut sets = b.sets().to_vec();
    sets.sort();
    let d = sp.domain();
    Ok(Output::new(
        "base",
        lines(sets.iter().map(|s| d.format_state(s))),
        json!({ "base": sets.iter().map(|s| labels(d, s)).collect::<Vec<_>>() }),
    ))
}

fn seqs_json(sp: &SequenceSpace) -> Value {
    let d = sp.domain();
    sp.sequences().iter().map(|s| s.iter().map(|&x| d.label(x)).collect::<Vec<_>>()).collect::<Vec<_>>().into()
}

fn minimize(input: &Path, output: Option<&Path>) -> Result<Output> {
    let m = load(input)?.minimize()?;
    let body = write_seqs(&m.space);
    let j = json!({ "sequences": seqs_json(&m.space), "output": output.map(|p| p.display().to_string()) });
    let text = match output {
        Some(p) => {
            write_file(p, &body)?;
            format!("wrote {} sequences to {}\n", m.space.k(), p.display())
        }
        None => body,
    };
    Ok(Output::new("minimize", text, j))
}

fn dims(input: &Path) -> Result<Output> {
    let sp = load(input)?;
    let r = DimensionReport::from_minimized(&sp.minimize()?);
    Ok(Output::new(
        "dims",
        format!("n {}\ndim_B {}\ndim_C {}\n", r.n, r.dim_b, r.dim_c),
        json!({ "n": r.n, "dim_b": r.dim_b, "dim_c": r.dim_c, "order_dim_is_2": r.order_dim_is_2 }),
    ))
}

fn project(input: &Path, keep: &str) -> Result<Output> {
    let sp = load(input)?;
    let keep = parse_concepts(sp.domain(), keep)?;
    let p = sp.project(&keep)?;
    Ok(Output::new(
        "project",
        write_space(&p),
        json!({ "format": p.kind(), "concepts": p.domain().labels(), "state_count": p.count() }),
    ))
}

fn fringe(input: &Path, state: &str) -> Result<Output> {
    let sp = load(input)?;
    let d = sp.domain();
    let s = parse_concepts(d, state)?;
    let fr = sp.state_fringes(&s)?;
    Ok(Output::new(
        "fringe",
        format!("inner {}\nouter {}\n", d.format_state(&fr.inner), d.format_state(&fr.outer)),
        json!({ "state": labels(d, &s), "inner": labels(d, &fr.inner), "outer": labels(d, &fr.outer) }),
    ))
}

fn fringe_space(input: &Path) -> Result<Output> {
    let sp = load(input)?;
    let f = space_fringe(&sp)?;
    let d = sp.domain();
    let mut text = String::new();
    for s in &f.removable {
        writeln!(text, "removable {}", d.format_state(s)).expect("string write");
    }
    for s in &f.addable {
        writeln!(text, "addable {}", d.format_state(s)).expect("string write");
    }
    let list = |v: &[State]| v.iter().map(|s| labels(d, s)).collect::<Vec<_>>();
    Ok(Output::new("fringe-space", text, json!({ "removable": list(&f.removable), "addable": list(&f.addable) })))
}

fn edit(name: &str, a: &EditArgs, f: impl Fn(&AnySpace, &State) -> learnspace::Result<Adapted>) -> Result<Output> {
    let sp = load(&a.input)?;
    let s = parse_concepts(sp.domain(), &a.state)?;
    let out = f(&sp, &s)?;
    let body = write_seqs(&out.space);
    let j = json!({
        "sequences": seqs_json(&out.space),
        "base_size": out.base.len(),
        "base_formula_agrees": out.base_formula_agrees,
    });
    let text = match &a.output {
        Some(p) => {
            write_file(p, &body)?;
            format!("wrote {} sequences to {}\n", out.space.k(), p.display())
        }
        None => body,
    };
    Ok(Output::new(name, text, j))
}

fn basic_words(input: &Path, limit: usize) -> Result<Output> {
    let sp = load(input)?;
    let w = enumerate_basic_words(&sp, limit);
    let d = sp.domain();
    let shown: Vec<String> = w.words.iter().map(|w| w.iter().map(|&x| d.label(x)).collect::<Vec<_>>().join(",")).collect();
    if w.truncated {
        log::warn!("stopped after {limit} words");
    }
    Ok(Output::new(
        "basic-words",
        lines(shown.iter().cloned()),
        json!({ "count": w.words.len(), "truncated": w.truncated, "words": shown }),
    ))
}

/// A state reached by adding random outer-fringe concepts until a random
/// size is reached.
fn random_state(sp: &AnySpace, rng: &mut ChaCha8Rng) -> Result<State> {
    let target = rng.gen_range(0..=sp.top().len());
    let mut s = sp.domain().empty_state();
    while s.len() < target {
        let outer: Vec<usize> = sp.state_fringes(&s)?.outer.iter().collect();
        s.insert(outer[rng.gen_range(0..outer.len())]);
    }
    Ok(s)
}

fn assess(a: &AssessArgs) -> Result<Output> {
    let sp = load(&a.input)?;
    let d = sp.domain().clone();
    let seed = a.seed.or(a.simulate).unwrap_or(0);
    let cfg = AssessmentConfig {
        model: ResponseModel::new(a.beta, a.eta)?,
        theta_lo: a.theta_lo,
        theta_hi: a.theta_hi,
        collection_size: a.collection_size,
        seed,
        ..Default::default()
    };
    cfg.validate()?;
    let seqs = Arc::new(sp.to_sequence_space()?);
    let mut text = format!("seed {seed}\n");
    let mut j = json!({ "seed": seed });
    let outcome = if let Some(sim) = a.simulate {
        let mut rng = ChaCha8Rng::seed_from_u64(sim);
        let truth = random_state(&sp, &mut rng)?;
        writeln!(text, "truth {}", d.format_state(&truth)).expect("string write");
        j["simulate"] = sim.into();
        j["truth"] = labels(&d, &truth).into();
        let (beta, eta) = (a.beta, a.eta);
        run_projection_assessment(
            seqs,
            |q| if truth.contains(q) { rng.gen::<f64>() >= beta } else { rng.gen::<f64>() < eta },
            &cfg,
        )?
    } else {
        let path = a.answers.as_deref().expect("clap requires a source");
        let mut answers = HashMap::new();
        for (i, line) in read(path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || CliError { message: format!("{}: line {}: expected `concept 0|1`", path.display(), i + 1), code: 2 };
            let (c, v) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
            let c = d.index_of(c.trim()).ok_or_else(bad)?;
            let v = match v.trim() {
                "1" => true,
                "0" => false,
                _ => return Err(bad()),
            };
            answers.insert(c, v);
        }
        let mut missing = None;
        let out = run_projection_assessment(
            seqs,
            |q| match answers.get(&q) {
                Some(&v) => v,
                None => {
                    missing.get_or_insert(q);
                    false
                }
            },
            &cfg,
        )?;
        if let Some(q) = missing {
            return Err(CliError::validation(format!("{}: no answer for concept {}", path.display(), d.label(q))));
        }
        out
    };
    let transcript = outcome.transcript.to_lines(&d);
    text.push_str(&lines(transcript.iter().cloned()));
    let fr = sp.state_fringes(&outcome.final_state)?;
    writeln!(text, "questions {}", outcome.questions).expect("string write");
    writeln!(text, "ready to learn {}", d.format_state(&fr.outer)).expect("string write");
    writeln!(text, "recently learned {}", d.format_state(&fr.inner)).expect("string write");
    if outcome.forced_stop {
        text.push_str("stopped with unsettled concepts\n");
    }
    j["transcript"] = transcript.into();
    j["final"] = labels(&d, &outcome.final_state).into();
    j["questions"] = outcome.questions.into();
    j["forced_stop"] = outcome.forced_stop.into();
    j["ready_to_learn"] = labels(&d, &fr.outer).into();
    j["recently_learned"] = labels(&d, &fr.inner).into();
    Ok(Output::new("assess", text, j))
}

fn fiber_cmd(input: &Path, know: &str, unknow: &str) -> Result<Output> {
    let sp = load(input)?;
    let d = sp.domain();
    let f = fiber(&sp, &parse_concepts(d, know)?, &parse_concepts(d, unknow)?)?;
    let sorted = f.sorted();
    Ok(Output::new(
        "fiber",
        lines(sorted.iter().map(|s| d.format_state(s))),
        json!({ "count": sorted.len(), "states": sorted.iter().map(|s| labels(d, s)).collect::<Vec<_>>() }),
    ))
}

fn recognize(input: &Path) -> Result<Output> {
    let fam = parse_states(&read(input)?).map_err(CliError::in_file(input))?;
    let gens = GeneratorFamily::from_family(&fam);
    Ok(match recognize_upper_subfamily(&gens)? {
        Some(c) => Output::new(
            "recognize-upper",
            format!("recognized\n{}", write_seqs(&c.space)),
            json!({ "recognized": true, "concepts": c.space.domain().labels(), "sequences": seqs_json(&c.space) }),
        ),
        None => Output::new("recognize-upper", "not recognized\n".into(), json!({ "recognized": false })),
    })
}

fn join_cmd(a: &Path, b: &Path) -> Result<Output> {
    let sa = load(a)?.to_sequence_space()?;
    let sb = load(b)?.to_sequence_space()?;
    let j = join(&sa, &sb)?;
    Ok(Output::new("join", write_seqs(&j), json!({ "sequences": seqs_json(&j) })))
}

fn semilattice(a: &SemilatticeArgs) -> Result<Output> {
    let t = parse_semilattice(&read(&a.input)?).map_err(CliError::in_file(&a.input))?;
    if a.check {
        let c = t.classify_elements();
        let witness = t.check_separated_equalizers().err();
        let mut text = format!(
            "irreducibles {:?}\nprimes {:?}\nsingulars {:?}\n",
            c.irreducibles, c.primes, c.singulars
        );
        match witness {
            None => text.push_str("separated equalizers yes\n"),
            Some(w) => writeln!(text, "separated equalizers no: {} {} equalize {} {}", w.x, w.y, w.a, w.b).expect("string write"),
        }
        let j = json!({
            "irreducibles": c.irreducibles,
            "primes": c.primes,
            "singulars": c.singulars,
            "separated_equalizers": witness.is_none(),
            "witness": witness.map(|w| json!({ "x": w.x, "y": w.y, "a": w.a, "b": w.b })),
        });
        Ok(Output::new("semilattice", text, j))
    } else if a.to_antimatroid {
        let rep = t.to_antimatroid();
        let d = rep.family.domain().clone();
        let mut text = write_states(&rep.family);
        writeln!(text, "# injective {} homomorphic {}", rep.injective, rep.homomorphic).expect("string write");
        let j = json!({
            "concepts": d.labels(),
            "sets": rep.sets.iter().map(|s| labels(&d, s)).collect::<Vec<_>>(),
            "injective": rep.injective,
            "homomorphic": rep.homomorphic,
            "learning_space": rep.family.is_learning_space(),
        });
        Ok(Output::new("semilattice", text, j))
    } else {
        match t.to_quasi_ordinal() {
            Ok(h) => Ok(Output::new(
                "semilattice",
                write_hasse(&h),
                json!({ "concepts": h.domain().labels(), "edges": h.edges() }),
            )),
            Err(x) => Err(CliError::validation(format!("object {x} is irreducible but not prime"))),
        }
    }
}
