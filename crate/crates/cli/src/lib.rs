//! Pipeline driver behind the `belyi` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use belyi::ansatz::{build_ansatz, BelyiAnsatz};
use belyi::exactnf::{certify_map, CertifiedBelyiMap, CertifyConfig, ExactError};
use belyi::lattice::RecognitionConfig;
use belyi::monodromy::{monodromy_triple, MonodromyConfig, NumericMap, DEFAULT_MAX_DEGREE, DEFAULT_TRACKING_BITS};
use belyi::perm::{simultaneously_conjugate, CycleType, Permutation};
use belyi::solve::{multistart_search, refine_guess, MultistartConfig, NumericSolution, PrecisionConfig};
use belyi::triple::{analyze, profile_from_passport, Passport, PermutationTriple, SubgroupProfile};
use rug::ops::Pow;
use rug::Rational;
use sha2::{Digest, Sha256};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVE: i32 = 3;
pub const EXIT_RECOGNITION: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;
pub const EXIT_MISMATCH: i32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn new(code: i32, msg: impl Into<String>) -> Self {
        CliError { code, msg: msg.into() }
    }

    fn input(msg: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, msg)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for CliError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Ansatz,
    Solve,
    Recognize,
    Verify,
    Monodromy,
    Roundtrip,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Ansatz => "ansatz",
            Command::Solve => "solve",
            Command::Recognize => "recognize",
            Command::Verify => "verify",
            Command::Monodromy => "monodromy",
            Command::Roundtrip => "roundtrip",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub prec_bits: u32,
    pub delta: Rational,
    pub starts: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub guess: Option<PathBuf>,
    pub max_monodromy_degree: usize,
    pub verbose: bool,
}

impl PipelineConfig {
    pub fn new(command: Command, inputs: Vec<PathBuf>) -> Self {
        PipelineConfig {
            command,
            inputs,
            prec_bits: 256,
            delta: Rational::from((99, 100)),
            starts: 4000,
            seed: 1,
            out: None,
            threads: 1,
            guess: None,
            max_monodromy_degree: DEFAULT_MAX_DEGREE,
            verbose: false,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if !(64..=1 << 24).contains(&self.prec_bits) {
            return Err(CliError::input(format!("--prec-bits {} outside [64, 2^24]", self.prec_bits)));
        }
        if self.delta <= Rational::from((1, 4)) || self.delta >= 1 {
            return Err(CliError::input(format!("--delta {} outside (1/4, 1)", self.delta)));
        }
        if self.starts == 0 {
            return Err(CliError::input("--starts must be positive"));
        }
        Ok(())
    }
}

/// `0.99`, `99/100` or an integer.
pub fn parse_delta(s: &str) -> Result<Rational, String> {
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let num: rug::Integer = digits.parse().map_err(|_| format!("bad decimal `{s}`"))?;
        let den = rug::Integer::from(10u32).pow(frac.len() as u32);
        return Ok(Rational::from((num, den)));
    }
    s.parse::<Rational>().map_err(|_| format!("bad rational `{s}`"))
}

/// Either a full triple or only its cycle types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Triple(PermutationTriple),
    Passport(Passport),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// `n`, `s0`, `s1` and optional `sinf` lines of 1-based images.
pub fn parse_triple_file(text: &str) -> Result<PermutationTriple, CliError> {
    match parse_input(text)? {
        Input::Triple(t) => Ok(t),
        Input::Passport(_) => Err(CliError::input("expected a triple, found a passport")),
    }
}

/// Triple file, or a passport file: `passport <n>` then `s0`, `s1`, `sinf`
/// lines holding cycle types such as `1^12 2^132`.
pub fn parse_input(text: &str) -> Result<Input, CliError> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| CliError::input("empty input"))?;
    let tok: Vec<&str> = head.split_whitespace().collect();
    let passport = match tok.as_slice() {
        ["n", _] => false,
        ["passport", _] => true,
        _ => return Err(CliError::input(format!("line {ln}: expected `n <degree>` or `passport <degree>`"))),
    };
    let n: usize = tok[1].parse().map_err(|_| CliError::input(format!("line {ln}: bad degree `{}`", tok[1])))?;
    if n == 0 {
        return Err(CliError::input(format!("line {ln}: degree must be positive")));
    }
    let mut rows: Vec<(usize, String, String)> = Vec::new();
    for (ln, l) in lines {
        let (name, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        if !matches!(name, "s0" | "s1" | "sinf") {
            return Err(CliError::input(format!("line {ln}: unknown key `{name}`")));
        }
        if rows.iter().any(|(_, k, _)| k == name) {
            return Err(CliError::input(format!("line {ln}: duplicate `{name}`")));
        }
        rows.push((ln, name.to_string(), rest.trim().to_string()));
    }
    let get = |k: &str| rows.iter().find(|(_, n, _)| n == k);
    let missing = |k: &str| CliError::input(format!("missing `{k}` line"));
    if passport {
        let ct = |k: &str| -> Result<CycleType, CliError> {
            let (ln, _, v) = get(k).ok_or_else(|| missing(k))?;
            v.parse().map_err(|e: belyi::perm::PermError| CliError::input(format!("line {ln}: {e}")))
        };
        return Ok(Input::Passport(Passport { n, s0: ct("s0")?, s1: ct("s1")?, sinf: ct("sinf")? }));
    }
    let perm = |k: &str| -> Result<Option<Permutation>, CliError> {
        let Some((ln, _, v)) = get(k) else { return Ok(None) };
        let imgs: Result<Vec<usize>, _> = v.split_whitespace().map(|t| t.parse::<usize>()).collect();
        let imgs = imgs.map_err(|_| CliError::input(format!("line {ln}: non-integer image")))?;
        if imgs.len() != n {
            return Err(CliError::input(format!("line {ln}: expected {n} images, found {}", imgs.len())));
        }
        Permutation::from_images(&imgs).map(Some).map_err(|e| CliError::input(format!("line {ln}: {e}")))
    };
    let s0 = perm("s0")?.ok_or_else(|| missing("s0"))?;
    let s1 = perm("s1")?.ok_or_else(|| missing("s1"))?;
    let t = match perm("sinf")? {
        Some(sinf) => PermutationTriple::new(s0, s1, sinf),
        None => PermutationTriple::from_pair(s0, s1),
    };
    t.map(Input::Triple).map_err(|e| CliError::input(e.to_string()))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn text_of(bytes: &[u8], path: &Path) -> Result<String, CliError> {
    String::from_utf8(bytes.to_vec()).map_err(|_| CliError::input(format!("{}: not UTF-8", path.display())))
}

pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for b in inputs {
        h.update(b);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Comment lines prepended to every artifact.
pub fn header(cfg: &PipelineConfig, digest: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# belyi {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# command {}", cfg.command.name());
    let _ = writeln!(s, "# seed {}", cfg.seed);
    let _ = writeln!(s, "# precision {}", cfg.prec_bits);
    let _ = writeln!(s, "# input sha256:{digest}");
    s
}

/// Profile report plus the ansatz size and gauge.
pub fn analyze_report(prof: &SubgroupProfile) -> Result<String, CliError> {
    let a = build_ansatz(prof).map_err(|e| CliError::input(e.to_string()))?;
    let mut s = prof.report();
    let _ = writeln!(s, "unknowns {}", a.variable_count());
    let _ = writeln!(s, "equations {}", a.equation_count());
    let _ = writeln!(s, "normalization {}", a.normalization_string());
    Ok(s)
}

fn profile_of(input: &Input) -> Result<SubgroupProfile, CliError> {
    match input {
        Input::Triple(t) => analyze(t),
        Input::Passport(p) => profile_from_passport(p),
    }
    .map_err(|e| CliError::input(e.to_string()))
}

fn ansatz_of(input: &Input) -> Result<BelyiAnsatz, CliError> {
    build_ansatz(&profile_of(input)?).map_err(|e| CliError::input(e.to_string()))
}

fn certify_config(cfg: &PipelineConfig) -> CertifyConfig {
    CertifyConfig { recognition: RecognitionConfig { delta: cfg.delta.clone(), ..Default::default() }, ..Default::default() }
}

fn monodromy_config(cfg: &PipelineConfig) -> MonodromyConfig {
    MonodromyConfig { max_degree: cfg.max_monodromy_degree, prec: DEFAULT_TRACKING_BITS, ..Default::default() }
}

fn solve_classes(cfg: &PipelineConfig, a: &BelyiAnsatz) -> Result<Vec<NumericSolution>, CliError> {
    let precision = PrecisionConfig::with_target(cfg.prec_bits);
    if let Some(g) = &cfg.guess {
        let text = text_of(&read(g)?, g)?;
        let sol = NumericSolution::from_text(a, &text).map_err(|e| CliError::input(format!("{}: {e}", g.display())))?;
        let r = refine_guess(&sol.ansatz, &sol.coeffs, &precision).map_err(|e| CliError::new(EXIT_SOLVE, e.to_string()))?;
        return Ok(vec![r]);
    }
    let ms = MultistartConfig { starts: cfg.starts, seed: cfg.seed, threads: cfg.threads, precision };
    let sols = multistart_search(a, &ms);
    if sols.is_empty() {
        return Err(CliError::new(EXIT_SOLVE, format!("no solution from {} starts (seed {})", cfg.starts, cfg.seed)));
    }
    Ok(sols)
}

fn recognition_error(e: ExactError) -> CliError {
    match e {
        ExactError::PredicateFailed(_) => CliError::new(EXIT_VERIFICATION, e.to_string()),
        _ => CliError::new(EXIT_RECOGNITION, e.to_string()),
    }
}

/// Failing predicate names of a parsed map, re-derived from its exact data.
pub fn verify_map(map: &CertifiedBelyiMap) -> Vec<String> {
    let fresh = map.verify();
    let mut failed: Vec<String> = fresh.iter().filter(|p| !p.passed).map(|p| p.name.clone()).collect();
    for p in &map.certificate {
        if !fresh.iter().any(|q| q.name == p.name) {
            failed.push(format!("{} (unknown predicate)", p.name));
        } else if !p.passed {
            failed.push(format!("{} (recorded as failed)", p.name));
        }
    }
    failed.dedup();
    failed
}

/// Output sink: a file when `--out` is given, stdout otherwise.
fn emit(cfg: &PipelineConfig, body: &str, digest: &str) -> Result<(), CliError> {
    let text = format!("{}{body}", header(cfg, digest));
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn need_inputs(cfg: &PipelineConfig, k: usize) -> Result<(), CliError> {
    if cfg.inputs.len() != k {
        return Err(CliError::input(format!("`{}` takes {k} input file(s), got {}", cfg.command.name(), cfg.inputs.len())));
    }
    Ok(())
}

/// Runs one subcommand; `Ok` means exit status 0.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(), CliError> {
    cfg.check()?;
    let raw: Vec<Vec<u8>> = cfg.inputs.iter().map(|p| read(p)).collect::<Result<_, _>>()?;
    let texts: Vec<String> = raw.iter().zip(&cfg.inputs).map(|(b, p)| text_of(b, p)).collect::<Result<_, _>>()?;
    let dig = digest(&raw);
    match cfg.command {
        Command::Analyze => {
            need_inputs(cfg, 1)?;
            emit(cfg, &analyze_report(&profile_of(&parse_input(&texts[0])?)?)?, &dig)
        }
        Command::Ansatz => {
            need_inputs(cfg, 1)?;
            emit(cfg, &ansatz_of(&parse_input(&texts[0])?)?.describe(), &dig)
        }
        Command::Solve => {
            need_inputs(cfg, 1)?;
            let a = ansatz_of(&parse_input(&texts[0])?)?;
            let sols = solve_classes(cfg, &a)?;
            eprintln!("{} solution class(es)", sols.len());
            emit(cfg, &sols[0].to_text(), &dig)?;
            if let Some(out) = &cfg.out {
                for (k, s) in sols.iter().enumerate().skip(1) {
                    let p = PathBuf::from(format!("{}.{}", out.display(), k + 1));
                    std::fs::write(&p, format!("{}{}", header(cfg, &dig), s.to_text()))
                        .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
                }
            }
            Ok(())
        }
        Command::Recognize => {
            need_inputs(cfg, 2)?;
            let a = ansatz_of(&parse_input(&texts[0])?)?;
            let sol = NumericSolution::from_text(&a, &texts[1])
                .map_err(|e| CliError::input(format!("{}: {e}", cfg.inputs[1].display())))?;
            let map = certify_map(&sol, &certify_config(cfg)).map_err(recognition_error)?;
            emit(cfg, &map.to_text(), &dig)
        }
        Command::Verify => {
            need_inputs(cfg, 1)?;
            let map = CertifiedBelyiMap::from_text(&texts[0]).map_err(|e| CliError::input(e.to_string()))?;
            let mut report = String::new();
            for p in map.verify() {
                let _ = writeln!(report, "{}: {}", p.name, if p.passed { "pass" } else { "fail" });
            }
            let failed = verify_map(&map);
            emit(cfg, &report, &dig)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::new(EXIT_VERIFICATION, format!("verification failed: {}", failed.join(", "))))
            }
        }
        Command::Monodromy => {
            need_inputs(cfg, 1)?;
            let map = CertifiedBelyiMap::from_text(&texts[0]).map_err(|e| CliError::input(e.to_string()))?;
            let m = NumericMap::from_certified(&map, DEFAULT_TRACKING_BITS).map_err(|e| CliError::input(e.to_string()))?;
            let t = monodromy_triple(&m, &monodromy_config(cfg)).map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))?;
            emit(cfg, &t.to_text(), &dig)
        }
        Command::Roundtrip => {
            need_inputs(cfg, 1)?;
            roundtrip(cfg, &texts[0], &dig)
        }
    }
}

struct Artifacts<'a> {
    cfg: &'a PipelineConfig,
    digest: &'a str,
    stages: Vec<(String, String)>,
}

impl Artifacts<'_> {
    fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        let Some(dir) = &self.cfg.out else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
        let p = dir.join(name);
        std::fs::write(&p, format!("{}{body}", header(self.cfg, self.digest)))
            .map_err(|e| CliError::input(format!("{}: {e}", p.display())))
    }

    fn stage(&mut self, name: &str, status: impl Into<String>) {
        let status = status.into();
        if self.cfg.verbose {
            eprintln!("{name}: {status}");
        }
        self.stages.push((name.to_string(), status));
    }

    /// Writes `summary.txt`; a failed run is marked `status partial`.
    fn finish(&self, result: Result<(), CliError>) -> Result<(), CliError> {
        let mut s = String::new();
        for (k, v) in &self.stages {
            let _ = writeln!(s, "{k}: {v}");
        }
        match &result {
            Ok(()) => s.push_str("status complete\n"),
            Err(e) => {
                let _ = writeln!(s, "status partial (exit {}): {}", e.code, e.msg);
            }
        }
        if self.cfg.out.is_none() {
            eprint!("{s}");
        }
        self.write("summary.txt", &s)?;
        result
    }
}

fn roundtrip(cfg: &PipelineConfig, text: &str, dig: &str) -> Result<(), CliError> {
    let mut art = Artifacts { cfg, digest: dig, stages: Vec::new() };
    let result = roundtrip_stages(cfg, text, &mut art);
    art.finish(result)
}

fn roundtrip_stages(cfg: &PipelineConfig, text: &str, art: &mut Artifacts) -> Result<(), CliError> {
    let t = parse_triple_file(text)?;
    let prof = profile_of(&Input::Triple(t.clone()))?;
    art.write("profile.txt", &analyze_report(&prof)?)?;
    art.stage("analyze", "ok");
    let a = build_ansatz(&prof).map_err(|e| CliError::input(e.to_string()))?;
    art.write("ansatz.txt", &a.describe())?;
    let sols = solve_classes(cfg, &a).inspect_err(|e| art.stage("solve", format!("failed: {}", e.msg)))?;
    art.stage("solve", format!("{} class(es)", sols.len()));
    let mut last_err = None;
    for (k, sol) in sols.iter().enumerate() {
        let class = k + 1;
        let map = match certify_map(sol, &certify_config(cfg)) {
            Ok(m) => m,
            Err(e) => {
                art.stage(&format!("class {class}"), format!("recognition failed: {e}"));
                last_err.get_or_insert(recognition_error(e));
                continue;
            }
        };
        let map_text = map.to_text();
        let reparsed = CertifiedBelyiMap::from_text(&map_text).map_err(|e| CliError::new(EXIT_VERIFICATION, e.to_string()))?;
        let failed = verify_map(&reparsed);
        if !failed.is_empty() {
            art.stage(&format!("class {class}"), format!("verification failed: {}", failed.join(", ")));
            last_err.get_or_insert(CliError::new(EXIT_VERIFICATION, failed.join(", ")));
            continue;
        }
        let recovered = NumericMap::from_certified(&reparsed, DEFAULT_TRACKING_BITS)
            .and_then(|m| monodromy_triple(&m, &monodromy_config(cfg)));
        let back = match recovered {
            Ok(b) => b,
            Err(e) => {
                art.stage(&format!("class {class}"), format!("monodromy failed: {e}"));
                last_err.get_or_insert(CliError::new(EXIT_MISMATCH, e.to_string()));
                continue;
            }
        };
        let conj = simultaneously_conjugate(&back, &t, Duration::from_secs(60))
            .map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))?;
        if conj.is_none() {
            art.stage(&format!("class {class}"), "monodromy not conjugate to input");
            last_err.get_or_insert(CliError::new(EXIT_MISMATCH, "recovered triple not conjugate to the input"));
            continue;
        }
        art.write("solution.txt", &sol.to_text())?;
        art.write("map.txt", &map_text)?;
        art.write("triple.txt", &back.to_text())?;
        art.stage(&format!("class {class}"), format!("certified over field of degree {}, conjugate to input", map.field.degree()));
        return Ok(());
    }
    Err(last_err.unwrap_or_else(|| CliError::new(EXIT_SOLVE, "no solution classes")))
}
