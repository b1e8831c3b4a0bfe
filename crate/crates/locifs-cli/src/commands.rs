//! Subcommand implementations. Each returns the lines printed on success.

use std::fs;
use std::path::Path;

use locifs::beta::{BetaSystem, LexStatus};
use locifs::config::{System, SystemConfig};
use locifs::geometry::io::{to_pgm, to_ppm, write_gset};
use locifs::ifs::AttractorSummary;
use locifs::scenarios::{self, DEFAULT_LEVEL, DEFAULT_LEVEL_1D, DEFAULT_WINDOW};
use locifs::shadowing::{
    self, make_pseudo_orbit, negative_shadowing_certificate, pseudo_orbit_csv, random_orbit_word, shadow_search,
    shadowing_gap, true_orbit, GapCurve, PseudoOrbit, ShadowResult,
};
use locifs::stability::{family_sweep, Family, SweepConfig};
use locifs::symbolic::{count_table, digits, follower_count, is_k_step_sft, LanguageSample, SftReport};
use locifs::{GridSet, LocalIfs, Space};
use serde::Serialize;

use crate::error::CliError;
use crate::{Cli, Command, Common};

/// Width of the bar strip drawn for one-dimensional attractors.
const STRIP_WIDTH: usize = 1024;
const STRIP_HEIGHT: usize = 64;

pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    match &cli.command {
        Command::Attractor { common, max_iter, tol } => cmd_attractor(common, *max_iter, *tol),
        Command::Codespace { common, depth, max_step, restrict } => cmd_codespace(common, *depth, *max_step, restrict.as_deref()),
        Command::Shadow { common, delta, epsilon, horizon, gap_deltas } => {
            cmd_shadow(common, *delta, *epsilon, *horizon, gap_deltas.as_deref())
        }
        Command::Beta { common, depth, words, restrict } => cmd_beta(common, *depth, *words, restrict.as_deref()),
        Command::Sweep { common, params, threshold, max_iter } => cmd_sweep(common, params.as_deref(), *threshold, *max_iter),
        Command::Embed { common, max_iter } => cmd_embed(common, *max_iter),
    }
}

struct Loaded {
    name: String,
    system: System,
    word: Option<Vec<u8>>,
    beta: Option<BetaSystem>,
}

fn load(common: &Common, default: &str) -> Result<Loaded, CliError> {
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let cfg: SystemConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let system = cfg.build()?;
        return Ok(Loaded { name: path.display().to_string(), system, word: cfg.word()?, beta: None });
    }
    let name = common.system.clone().unwrap_or_else(|| default.to_string());
    let level = common.level;
    let grid = |ifs| Loaded { name: name.clone(), system: System::Grid(ifs), word: None, beta: None };
    Ok(match name.as_str() {
        "superfractal" => grid(scenarios::superfractal(common.param.unwrap_or(0.3), level.unwrap_or(DEFAULT_LEVEL))?),
        "nonsemicont" => grid(scenarios::nonsemicont(common.param.unwrap_or(0.3), level.unwrap_or(DEFAULT_LEVEL))?),
        "markov2" => grid(scenarios::markov2(level.unwrap_or(DEFAULT_LEVEL))?),
        "global2" => grid(scenarios::global2(level.unwrap_or(DEFAULT_LEVEL))?),
        "gd-2cycle" => grid(scenarios::gd_2cycle(level.unwrap_or(DEFAULT_LEVEL))?.ifs),
        "exshift2" => Loaded {
            name: name.clone(),
            system: System::Seq(scenarios::exshift2(level.unwrap_or(DEFAULT_WINDOW))?),
            word: None,
            beta: None,
        },
        "beta-golden" | "beta-sparse" => {
            let b = if name == "beta-golden" { scenarios::beta_golden() } else { scenarios::beta_sparse()? };
            let ifs = b.local_ifs(level.unwrap_or(DEFAULT_LEVEL_1D))?;
            Loaded { name: name.clone(), system: System::Grid(ifs), word: None, beta: Some(b) }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown system `{other}`; builtins: {}",
                scenarios::BUILTINS.join(", ")
            )))
        }
    })
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<String, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(format!("wrote {}", path.display()))
}

fn image(set: &GridSet) -> Result<(&'static str, Vec<u8>), CliError> {
    Ok(if set.dim() == 2 {
        ("ppm", to_ppm(&[(set, [0, 0, 0])])?)
    } else {
        ("pgm", to_pgm(set, STRIP_WIDTH, STRIP_HEIGHT))
    })
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| CliError::Config(format!("bad {what} `{s}`"))))
        .collect()
}

#[derive(Serialize)]
struct AttractorFile<'a> {
    system: &'a str,
    backend: &'a str,
    resolution: u8,
    maps: usize,
    cells: usize,
    diameter: f64,
    slack: f64,
    summary: &'a AttractorSummary,
}

fn attractor_file<S: Space>(name: &str, ifs: &LocalIfs<S>, resolution: u8, set: &S::Set, summary: &AttractorSummary) -> String {
    let sp = ifs.space();
    let file = AttractorFile {
        system: name,
        backend: sp.backend(),
        resolution,
        maps: ifs.len(),
        cells: sp.size(set),
        diameter: sp.diameter(set),
        slack: sp.slack(),
        summary,
    };
    toml::to_string(&file).expect("serializable report")
}

fn cmd_attractor(common: &Common, max_iter: usize, tol: f64) -> Result<Vec<String>, CliError> {
    let loaded = load(common, "superfractal")?;
    let out = &common.out;
    let mut lines = Vec::new();
    match &loaded.system {
        System::Grid(ifs) => {
            let rep = ifs.attractor(max_iter, tol)?;
            let (ext, bytes) = image(&rep.set)?;
            lines.push(write(out, &format!("attractor.{ext}"), bytes)?);
            let mut gset = Vec::new();
            write_gset(&rep.set, &mut gset)?;
            lines.push(write(out, "attractor.gset", gset)?);
            let report = attractor_file(&loaded.name, ifs, ifs.space().level, &rep.set, &rep.summary);
            lines.push(write(out, "attractor_report.toml", report)?);
            lines.push(format!("{} cells after {} iterations", rep.set.count(), rep.summary.iterations));
        }
        System::Seq(ifs) => {
            let rep = ifs.attractor(max_iter, tol)?;
            let text: String = rep.set.words().iter().map(|w| format!("[{}]\n", digits(w))).collect();
            lines.push(write(out, "attractor_cylinders.txt", text)?);
            let report = attractor_file(&loaded.name, ifs, ifs.space().window, &rep.set, &rep.summary);
            lines.push(write(out, "attractor_report.toml", report)?);
            lines.push(format!("{} cylinders after {} iterations", rep.set.len(), rep.summary.iterations));
        }
    }
    Ok(lines)
}

fn sft_text(lang: &LanguageSample, depth: usize, max_step: usize) -> Result<(String, bool), CliError> {
    let reports: Vec<SftReport> = (0..=max_step.min(depth.saturating_sub(1)))
        .map(|k| is_k_step_sft(lang, k, depth))
        .collect::<Result<_, _>>()?;
    let first = reports.iter().find(|r| r.holds);
    let mut s = match first {
        Some(r) => format!("SFT YES: {}-step certificate to depth {depth}\n", r.step),
        None => format!("SFT NO: no k <= {} passes to depth {depth}\n", reports.len().saturating_sub(1)),
    };
    for r in &reports {
        s += &format!("k = {}: {}\n", r.step, r.summary());
    }
    Ok((s, first.is_some()))
}

fn followers_csv(lang: &LanguageSample) -> Result<String, CliError> {
    let mut s = String::from("m,words,followers\n");
    for m in 1..lang.depth() {
        s += &format!("{m},{},{}\n", lang.count(m), follower_count(lang, m)?);
    }
    Ok(s)
}

fn negative_text<S: Space>(ifs: &LocalIfs<S>, depth: usize) -> Result<String, CliError> {
    let rep = ifs.attractor(200, 0.0)?;
    let osc = ifs.osc_probe(&rep.set);
    let cert = negative_shadowing_certificate(ifs, Some(&osc), 1, depth)?;
    Ok(format!("osc probe: {}\n{}\n", osc.summary(), cert.summary()))
}

fn cmd_codespace(common: &Common, depth: usize, max_step: usize, restrict: Option<&str>) -> Result<Vec<String>, CliError> {
    if depth < 2 {
        return Err(CliError::Config("depth must be at least 2".into()));
    }
    let loaded = load(common, "superfractal")?;
    let (lang, extra) = match (restrict, &loaded.beta, &loaded.system) {
        (Some(r), Some(b), _) => (b.restricted_words(&parse_list::<u8>(r, "digit")?, depth)?, String::new()),
        (Some(_), None, _) => return Err(CliError::Config("--restrict applies to β-derived systems only".into())),
        (None, _, System::Grid(ifs)) => (ifs.code_words(depth)?, negative_text(ifs, depth)?),
        (None, _, System::Seq(ifs)) => (ifs.code_words(depth)?, negative_text(ifs, depth)?),
    };
    let out = &common.out;
    let (sft, holds) = sft_text(&lang, depth, max_step)?;
    let mut lines = vec![
        write(out, "language.txt", lang.to_text())?,
        write(out, "sft_report.txt", format!("{sft}{extra}"))?,
        write(out, "followers.csv", followers_csv(&lang)?)?,
    ];
    let counts: Vec<String> = lang.counts().iter().skip(1).map(|c| c.to_string()).collect();
    lines.push(format!("word counts: {}", counts.join(" ")));
    lines.push(sft.lines().next().unwrap_or_default().to_string());
    if common.assert && !holds {
        return Err(CliError::Negative(lines.pop().unwrap_or_default()));
    }
    Ok(lines)
}

fn shadow_files<S: Space>(
    ifs: &LocalIfs<S>,
    po: &PseudoOrbit<S::Point>,
    result: &ShadowResult<S::Point>,
    curve: &GapCurve,
    out: &Path,
    extra: String,
) -> Result<Vec<String>, CliError> {
    let sp = ifs.space();
    let text = format!(
        "delta = {}\nverified = {}\nmax_step_error = {}\n{}{extra}",
        po.delta,
        po.verified,
        po.max_step_error(),
        result.to_text(|p| sp.format_point(p))
    );
    Ok(vec![
        write(out, "pseudo_orbit.csv", pseudo_orbit_csv(sp, po))?,
        write(out, "shadow_result.txt", text)?,
        write(out, "gap_curve.csv", curve.to_csv())?,
        format!("{} (epsilon {})", result.status_name(), result.epsilon),
    ])
}

fn grid_pseudo_orbit<S: Space>(
    ifs: &LocalIfs<S>,
    word: Option<&[u8]>,
    delta: f64,
    horizon: usize,
    seed: u64,
) -> Result<(PseudoOrbit<S::Point>, Vec<u8>), CliError> {
    let rep = ifs.attractor(200, 0.0)?;
    let (start, generated) = random_orbit_word(ifs, &rep.set, horizon + 1, seed)
        .ok_or_else(|| CliError::Config("random orbit left every domain".into()))?;
    let word = word.map(<[u8]>::to_vec).unwrap_or(generated);
    let po = if delta == 0.0 {
        true_orbit(ifs, &word, &start, f64::MIN_POSITIVE)?
    } else {
        make_pseudo_orbit(ifs, &rep.set, &word, delta, seed)?
    };
    Ok((po, word))
}

fn cmd_shadow(common: &Common, delta: Option<f64>, epsilon: f64, horizon: usize, gap_deltas: Option<&str>) -> Result<Vec<String>, CliError> {
    if epsilon.is_nan() || epsilon <= 0.0 || horizon == 0 {
        return Err(CliError::Config("epsilon and horizon must be positive".into()));
    }
    let loaded = load(common, "exshift2")?;
    let out = &common.out;
    let delta = delta.unwrap_or(1.0 / 64.0);
    if delta.is_nan() || delta < 0.0 {
        return Err(CliError::Config(format!("delta must be non-negative, got {delta}")));
    }
    let mut lines = match &loaded.system {
        System::Seq(ifs) if loaded.name == "exshift2" => {
            let m = -delta.log2();
            if m.fract() != 0.0 || m < 3.0 {
                return Err(CliError::Config("exshift2 needs delta = 2^-m with m >= 3".into()));
            }
            let po = scenarios::exshift2_pseudo_orbit(ifs, m as u32, horizon)?;
            let result = shadow_search(ifs, &po, epsilon)?;
            let ms: Vec<u32> = match gap_deltas {
                Some(t) => parse_list::<f64>(t, "delta")?.iter().map(|d| (-d.log2()).round() as u32).collect(),
                None => (4..=10).collect(),
            };
            let curve = scenarios::exshift2_gap_curve(ifs, &ms, horizon)?;
            shadow_files(ifs, &po, &result, &curve, out, String::new())?
        }
        System::Seq(ifs) => {
            let (po, word) = grid_pseudo_orbit(ifs, loaded.word.as_deref(), delta, horizon, common.seed)?;
            let result = shadow_search(ifs, &po, epsilon)?;
            let curve = shadowing_gap(ifs, &word, &gap_list(gap_deltas)?)?;
            shadow_files(ifs, &po, &result, &curve, out, String::new())?
        }
        System::Grid(ifs) => {
            let (po, word) = grid_pseudo_orbit(ifs, loaded.word.as_deref(), delta, horizon, common.seed)?;
            let result = shadow_search(ifs, &po, epsilon)?;
            let curve = shadowing_gap(ifs, &word, &gap_list(gap_deltas)?)?;
            let extra = match shadowing::l1_bound(delta, ifs.rate(), 0, 0.0) {
                Ok(b) => format!("contraction_bound = {b}\n"),
                Err(_) => String::new(),
            };
            shadow_files(ifs, &po, &result, &curve, out, extra)?
        }
    };
    if common.assert && lines.last().is_some_and(|l| l.starts_with("CertifiedNone")) {
        return Err(CliError::Negative(lines.pop().unwrap_or_default()));
    }
    Ok(lines)
}

fn gap_list(text: Option<&str>) -> Result<Vec<f64>, CliError> {
    match text {
        Some(t) => parse_list(t, "delta"),
        None => Ok((3..=10).map(|m| 0.5f64.powi(m)).collect()),
    }
}

fn cmd_beta(common: &Common, depth: usize, words: usize, restrict: Option<&str>) -> Result<Vec<String>, CliError> {
    let b = match (common.param, common.system.as_deref()) {
        (Some(beta), _) => BetaSystem::with_depth(beta.into(), depth, locifs::beta::DEFAULT_TOL)?,
        (None, None | Some("beta-golden")) => scenarios::beta_golden(),
        (None, Some("beta-sparse")) => scenarios::beta_sparse()?,
        (None, Some(other)) => return Err(CliError::Config(format!("`{other}` is not a β system; use --param"))),
    };
    let lang = match restrict {
        Some(r) => b.restricted_words(&parse_list::<u8>(r, "digit")?, words)?,
        None => b.words(words)?,
    };
    let mut report = b.report();
    let lex = b.lex_admissible(&b.one_digits().digits[..b.one_digits().reliable.min(depth)], depth)?;
    report += &format!("expansion_of_one_admissible = {}\n", matches!(lex, LexStatus::Admissible));
    let mut csv = String::from("length,words\n");
    for (k, c) in count_table(&lang) {
        csv += &format!("{k},{c}\n");
    }
    let out = &common.out;
    Ok(vec![
        write(out, "beta_report.txt", &report)?,
        write(out, "word_counts.csv", csv)?,
        format!("classification: {}", b.classification()),
    ])
}

fn cmd_sweep(common: &Common, params: Option<&str>, threshold: f64, max_iter: usize) -> Result<Vec<String>, CliError> {
    let name = common.system.as_deref().unwrap_or("nonsemicont");
    let family = Family::parse(name).ok_or_else(|| CliError::Config(format!("unknown family `{name}`")))?;
    let params = match params {
        Some(t) => parse_list(t, "parameter")?,
        None => match family {
            Family::Superfractal => vec![0.0, 0.3, 1.0],
            Family::Nonsemicont => vec![0.20, 0.24, 0.26, 0.30],
            Family::Beta1d => vec![1.5, 1.618, 1.7],
        },
    };
    let level = common.level.unwrap_or(if family == Family::Beta1d { DEFAULT_LEVEL_1D } else { DEFAULT_LEVEL });
    let mut cfg = SweepConfig::new(family, params, level);
    cfg.threshold = threshold;
    cfg.max_iter = max_iter;
    let report = family_sweep(&cfg)?;
    let out = &common.out;
    let mut lines = vec![
        write(out, "sweep.csv", report.to_csv())?,
        write(out, "sweep_jumps.csv", report.jumps_csv())?,
        write(out, "sweep_report.txt", report.summary())?,
    ];
    for (k, e) in report.entries.iter().enumerate() {
        let (ext, bytes) = image(&e.set)?;
        lines.push(write(out, &format!("attractor_{k}.{ext}"), bytes)?);
    }
    lines.extend(report.summary().lines().map(str::to_string));
    if common.assert && report.flagged_jumps().next().is_some() {
        return Err(CliError::Negative("lower-semicontinuity failure detected".into()));
    }
    Ok(lines)
}

fn cmd_embed(common: &Common, max_iter: usize) -> Result<Vec<String>, CliError> {
    let name = common.system.as_deref().unwrap_or("gd-2cycle");
    if name != "gd-2cycle" {
        return Err(CliError::Config(format!("no graph-directed builtin `{name}`")));
    }
    let gd = scenarios::gd_2cycle(common.level.unwrap_or(DEFAULT_LEVEL))?;
    let matrix = gd.ifs.transition_matrix();
    let composable = gd.graph.composability()?;
    let markov = gd.ifs.markov_condition(gd.zeta(), 8)?;
    let rep = gd.ifs.attractor(max_iter, 0.0)?;
    let errors = gd.fiber_equation_errors(&rep.set);
    let mut text = format!(
        "vertices = {}\nedges = {:?}\nscale = {}\ngap = {}\ntransition_matrix = {}\ncomposability = {}\nmatches = {}\nmarkov_zeta = {}\nmarkov_passes = {}\n",
        gd.graph.vertices(),
        gd.graph.edges(),
        gd.scale,
        gd.gap,
        matrix.to_strings().join(" "),
        composable.to_strings().join(" "),
        matrix == composable,
        markov.zeta,
        markov.passes
    );
    for (v, e) in errors.iter().enumerate() {
        text += &format!("fiber_equation_error[{v}] = {e}\n");
    }
    let layers: Vec<(&GridSet, [u8; 3])> = vec![(&gd.copies[0], [230, 230, 250]), (&gd.copies[1], [250, 235, 215]), (&rep.set, [0, 0, 0])];
    let out = &common.out;
    Ok(vec![
        write(out, "embed_report.txt", text)?,
        write(out, "embed_attractor.ppm", to_ppm(&layers)?)?,
        format!("transition matrix {}", matrix.to_strings().join(" ")),
    ])
}
