//! The `cycpres` command line: argument parsing, dispatch, and JSON or text
//! reports. [`run`] is the whole program minus process exit.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cycpres_core::abelian::{abelianization, relation_matrix, smith_normal_form};
use cycpres_core::covers::{self, SemidirectOverZ};
use cycpres_core::homsearch::{self, verify_hom};
use cycpres_core::intpoly::{
    associated_polynomial, classify_cyclotomic_type, resultant_with_cyclic,
};
use cycpres_core::num_bigint::BigInt;
use cycpres_core::present::{h_n_presentation, PresentationFile};
use cycpres_core::rescert::{self, FiniteIndexSubgroup, SubgroupFile};
use cycpres_core::words::infer_endomorphism_naming;
use cycpres_core::{
    AbelianGroupStructure, CyclicWordFamily, Endomorphism, Error, Naming, PermGroup, Permutation,
    Presentation, Word, DEFAULT_BUDGET,
};

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NO_RESULT: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const VERIFICATION: i32 = 4;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "cycpres",
    version,
    about = "Cyclically presented groups: abelianizations, finite quotients, covers and residual finiteness"
)]
pub struct CommandConfig {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Re-run the independent verification path and fail on mismatch.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Search budget in relator evaluations.
    #[arg(long, global = true, env = "CYCPRES_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Worker hint; results never depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit presentations of G_n(v) or H_n(w).
    #[command(subcommand)]
    Present(PresentCommand),
    /// Associated polynomial of a cyclic word.
    #[command(subcommand)]
    Poly(PolyCommand),
    /// Abelianization of G_n(v) or of a presentation file.
    Ab(AbArgs),
    /// Free-by-cyclic structure of a cyclic word.
    #[command(subcommand)]
    Fbc(FbcCommand),
    /// Homomorphisms onto finite groups.
    #[command(subcommand)]
    Quotient(QuotientCommand),
    /// Cyclic covers of F_r ⋊ Z.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Residual-finiteness certificates and pullback orbits.
    #[command(subcommand)]
    Rf(RfCommand),
    /// Truncated Magnus expansion of a word.
    Magnus(MagnusArgs),
}

#[derive(Debug, Subcommand)]
pub enum PresentCommand {
    /// ⟨x_0..x_{n-1} | shifts of v⟩.
    Cyclic {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: usize,
        /// Ambient rank; defaults to one more than the largest index in v.
        #[arg(long)]
        d: Option<usize>,
    },
    /// ⟨x, t | w⟩, or ⟨x, t | w, t^n⟩ with --n.
    TwoGen {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolyCommand {
    Assoc {
        #[arg(long)]
        word: String,
        #[arg(long)]
        classify: bool,
        /// Also report Res(f, t^n - 1).
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct AbArgs {
    #[arg(long, requires = "n", conflicts_with = "presentation")]
    pub word: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "word")]
    pub presentation: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FbcCommand {
    Check {
        #[arg(long)]
        word: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupForm {
    /// G_n(v) on n generators.
    Cyclic,
    /// H_n(w) on x and t.
    TwoGen,
}

#[derive(Debug, Subcommand)]
pub enum QuotientCommand {
    /// Exhaustive scan of Hom(P, T).
    Scan {
        #[arg(long, conflicts_with = "word")]
        presentation: Option<PathBuf>,
        #[arg(long, requires = "n", required_unless_present = "presentation")]
        word: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "two-gen")]
        form: GroupForm,
        #[arg(long)]
        target: String,
    },
    /// A common n with explicit surjections G_n(v) onto every target.
    Find {
        #[arg(long)]
        word: String,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        #[arg(long)]
        max_n: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CoverCommand {
    /// Presentation of the index-n cover.
    Present {
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: u64,
    },
    /// Period of φ: F_r ↠ T under precomposition with α.
    Degree {
        #[arg(long)]
        word: String,
        #[arg(long)]
        target: String,
        /// Images of y_0..y_{r-1} in cycle notation, separated by `;`.
        #[arg(long)]
        phi: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RfCommand {
    Certificate {
        #[arg(long)]
        endo: String,
        /// Words over the fiber generators and t.
        #[arg(long)]
        witness: Vec<String>,
        /// Use this prime instead of the smallest admissible one.
        #[arg(long)]
        prime: Option<u64>,
    },
    Pullback {
        #[arg(long)]
        endo: String,
        #[arg(long)]
        subgroup: PathBuf,
        #[arg(long, default_value_t = rescert::DEFAULT_ORBIT_BOUND)]
        bound: usize,
    },
}

#[derive(Debug, Args)]
pub struct MagnusArgs {
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value_t = 2)]
    pub prime: u64,
    /// Truncation degree D: monomials of length below D are kept.
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Also report the least separating truncation degree.
    #[arg(long)]
    pub separate: bool,
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    body: Value,
}

impl Report {
    fn ok(body: Value) -> Report {
        Report {
            code: exit::OK,
            body,
        }
    }

    fn no_result(body: Value) -> Report {
        Report {
            code: exit::NO_RESULT,
            body,
        }
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::BudgetExceeded { .. } | Error::BoundExceeded { .. } => exit::BUDGET,
        Error::NotFreeByCyclic(_)
        | Error::NotSurjective(_)
        | Error::NoSurjection { .. }
        | Error::SingularAbelianization { .. } => exit::NO_RESULT,
        Error::Verification(_) => exit::VERIFICATION,
        _ => exit::USAGE,
    }
}

pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CommandConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(&config) {
        Ok(report) => Execution {
            code: report.code,
            stdout: render(&report.body, config.format),
            stderr: String::new(),
        },
        Err(e) => Execution {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(body: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(body).expect("values serialize") + "\n",
        Format::Text => {
            let mut out = String::new();
            if let Value::Object(map) = body {
                for (k, v) in map {
                    let shown = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k}: {shown}\n"));
                }
            } else {
                out.push_str(&body.to_string());
                out.push('\n');
            }
            out
        }
    }
}

type Result<T> = cycpres_core::Result<T>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn big(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn verification(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification(format!(
            "independent check failed: {what}"
        )))
    }
}

fn parse_family(text: &str, d: Option<usize>) -> Result<CyclicWordFamily> {
    let naming = Naming::infer(&[text], false)?;
    let word = naming.parse(text)?;
    if naming.names().iter().any(|n| !n.starts_with('x')) {
        return Err(Error::Parse(format!(
            "cyclic words use generators x0, x1, …; got {text:?}"
        )));
    }
    CyclicWordFamily::from_word(&word, d)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn target_group(name: &str) -> Result<PermGroup> {
    let g = PermGroup::from_name(name.trim())?;
    g.finalize();
    Ok(g)
}

fn dispatch(config: &CommandConfig) -> Result<Report> {
    let verify = config.verify;
    let budget = config.budget;
    match &config.command {
        Command::Present(PresentCommand::Cyclic { word, n, d }) => {
            let family = parse_family(word, *d)?;
            let p = family.cyclic_presentation(*n)?;
            let input = json!({"word": word, "n": n, "d": family.d()});
            Ok(Report::ok(merge(
                json!({"input": input}),
                to_value(&p.to_file()),
            )))
        }
        Command::Present(PresentCommand::TwoGen { word, n }) => {
            let family = parse_family(word, None)?;
            let w = family.v_to_w();
            let naming = Naming::two_generator();
            let file = match n {
                Some(n) => h_n_presentation(&w, *n)?.to_file(),
                None => Presentation::new(naming.clone(), vec![w.clone()])?.to_file(),
            };
            let input = json!({"word": word, "n": n});
            Ok(Report::ok(merge(
                json!({"input": input, "w": naming.format(&w)}),
                to_value(&file),
            )))
        }
        Command::Poly(PolyCommand::Assoc { word, classify, n }) => {
            poly(word, *classify, *n, verify)
        }
        Command::Ab(args) => ab(args, verify),
        Command::Fbc(FbcCommand::Check { word }) => fbc_check(word, verify),
        Command::Quotient(QuotientCommand::Scan {
            presentation,
            word,
            n,
            form,
            target,
        }) => {
            let (p, input) = match (presentation, word, n) {
                (Some(path), _, _) => {
                    let file: PresentationFile = read_json(path)?;
                    (
                        Presentation::from_file(&file)?,
                        json!({"presentation": file, "target": target}),
                    )
                }
                (None, Some(word), Some(n)) => {
                    let family = parse_family(word, None)?;
                    let p = match form {
                        GroupForm::Cyclic => family.cyclic_presentation(*n)?,
                        GroupForm::TwoGen => h_n_presentation(&family.v_to_w(), *n)?,
                    };
                    let form = match form {
                        GroupForm::Cyclic => "cyclic",
                        GroupForm::TwoGen => "two-gen",
                    };
                    (
                        p,
                        json!({"word": word, "n": n, "form": form, "target": target}),
                    )
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "give --presentation or --word with --n".into(),
                    ))
                }
            };
            let group = target_group(target)?;
            let report = homsearch::quotient_scan(&p, &group, budget)?;
            if verify {
                if let Some(images) = &report.sample_surjection {
                    let perms = images
                        .iter()
                        .map(|s| Permutation::parse_cycles(group.degree(), s))
                        .collect::<Result<Vec<_>>>()?;
                    let hom = verify_hom(&p, &group, perms)?;
                    verification(hom.is_some_and(|h| h.is_surjective()), "sample surjection")?;
                }
            }
            let body = merge(
                json!({"input": input, "verified": verify}),
                to_value(&report),
            );
            Ok(if report.surjection_count == 0 {
                Report::no_result(body)
            } else {
                Report::ok(body)
            })
        }
        Command::Quotient(QuotientCommand::Find {
            word,
            targets,
            max_n,
        }) => quotient_find(word, targets, *max_n, budget, verify),
        Command::Cover(CoverCommand::Present { word, n }) => {
            let family = parse_family(word, None)?;
            let fbc = family.fiber_automorphism()?;
            let semidirect = SemidirectOverZ::from_fiber(&fbc)?;
            let p = semidirect.cover_presentation(*n)?;
            let alpha = Naming::with_prefix("y", fbc.rank).format_endomorphism(&fbc.alpha);
            let input = json!({"word": word, "n": n});
            Ok(Report::ok(merge(
                json!({"input": input, "alpha": alpha}),
                to_value(&p.to_file()),
            )))
        }
        Command::Cover(CoverCommand::Degree { word, target, phi }) => {
            cover_degree(word, target, phi.as_deref(), budget, verify)
        }
        Command::Rf(RfCommand::Certificate {
            endo,
            witness,
            prime,
        }) => rf_certificate(endo, witness, *prime, verify),
        Command::Rf(RfCommand::Pullback {
            endo,
            subgroup,
            bound,
        }) => rf_pullback(endo, subgroup, *bound, verify),
        Command::Magnus(args) => magnus(args, verify),
    }
}

fn poly(word: &str, classify: bool, n: Option<usize>, verify: bool) -> Result<Report> {
    let family = parse_family(word, None)?;
    let f = associated_polynomial(&family);
    let mut body = json!({
        "input": {"word": word, "classify": classify, "n": n},
        "coefficients": f.coefficients().iter().map(big).collect::<Vec<_>>(),
        "polynomial": f.to_string(),
    });
    if classify {
        let c = classify_cyclotomic_type(&f);
        if verify {
            if let Some(rebuilt) = c.reconstruct() {
                verification(rebuilt == f, "classification reconstructs f")?;
            }
        }
        body["classification"] = to_value(&c);
    }
    if let Some(n) = n {
        body["resultant"] = big(&resultant_with_cyclic(&f, n));
    }
    body["verified"] = json!(verify);
    Ok(Report::ok(body))
}

fn ab(args: &AbArgs, verify: bool) -> Result<Report> {
    let (structure, input): (AbelianGroupStructure, Value) =
        match (&args.word, args.n, &args.presentation) {
            (Some(word), Some(n), None) => {
                let family = parse_family(word, None)?;
                let structure = abelianization(&family.cyclic_presentation(n)?);
                if verify {
                    let res = resultant_with_cyclic(&associated_polynomial(&family), n);
                    let matches = match structure.order() {
                        Some(order) => order == BigInt::from(res.magnitude().clone()),
                        None => res == BigInt::from(0),
                    };
                    verification(matches, "|Res(f_v, t^n - 1)| equals the order")?;
                }
                (structure, json!({"word": word, "n": n}))
            }
            (None, _, Some(path)) => {
                let file: PresentationFile = read_json(path)?;
                let p = Presentation::from_file(&file)?;
                if verify {
                    let form = smith_normal_form(&relation_matrix(&p));
                    verification(
                        form.u.mul(&relation_matrix(&p)).mul(&form.v) == form.d,
                        "U·M·V = D",
                    )?;
                }
                (abelianization(&p), json!({"presentation": file}))
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "give --word with --n, or --presentation".into(),
                ))
            }
        };
    let body = merge(
        json!({"input": input, "structure": structure.to_string(), "verified": verify}),
        to_value(&structure),
    );
    Ok(Report::ok(body))
}

fn fbc_check(word: &str, verify: bool) -> Result<Report> {
    let family = parse_family(word, None)?;
    let input = json!({"word": word});
    let Some(fbc) = family.free_by_cyclic_check()? else {
        return Ok(Report::no_result(
            json!({"input": input, "free_by_cyclic": false}),
        ));
    };
    let naming = Naming::with_prefix("y", fbc.rank);
    if verify {
        // v(y_0, …, y_{r-1}, α(y_{r-1})) must be trivial in F_r.
        let mut images: Vec<Word> = (0..fbc.rank)
            .map(|i| Word::generator(fbc.rank, i))
            .collect::<Result<_>>()?;
        images.push(fbc.alpha.image(fbc.rank - 1).clone());
        verification(
            fbc.normalized.substitute(&images)?.is_identity(),
            "fiber relation",
        )?;
    }
    Ok(Report::ok(json!({
        "input": input,
        "free_by_cyclic": true,
        "s": fbc.s,
        "l": fbc.l,
        "rank": fbc.rank,
        "alpha": naming.format_endomorphism(&fbc.alpha),
        "alpha_inverse": naming.format_endomorphism(&fbc.alpha_inverse),
        "verified": verify,
    })))
}

fn quotient_find(
    word: &str,
    targets: &[String],
    max_n: Option<u64>,
    budget: u64,
    verify: bool,
) -> Result<Report> {
    let family = parse_family(word, None)?;
    let fbc = family.fiber_automorphism()?;
    let groups = targets
        .iter()
        .map(|t| target_group(t))
        .collect::<Result<Vec<_>>>()?;
    let schedule = covers::simple_quotient_schedule(&family, &fbc, &groups, budget)?;
    let input = json!({"word": word, "targets": targets, "max_n": max_n});
    if max_n.is_some_and(|m| schedule.n > m) {
        return Ok(Report::no_result(json!({
            "input": input,
            "status": "common degree exceeds --max-n",
            "n": schedule.n,
            "lcm": schedule.lcm,
        })));
    }
    let mut body = merge(json!({"input": input}), to_value(&schedule));
    body["progression"] = json!({"first": schedule.n, "step": schedule.lcm});
    if verify {
        for (s, g) in schedule.surjections.iter().zip(&groups) {
            s.verify(&family, &fbc, g)?;
        }
        let next = schedule.lift_at(&family, &fbc, &groups, schedule.member(1))?;
        for (s, g) in next.iter().zip(&groups) {
            s.verify(&family, &fbc, g)?;
        }
        body["next_member_verified"] = json!(schedule.member(1));
    }
    body["verified"] = json!(verify);
    Ok(Report::ok(body))
}

fn cover_degree(
    word: &str,
    target: &str,
    phi: Option<&str>,
    budget: u64,
    verify: bool,
) -> Result<Report> {
    let family = parse_family(word, None)?;
    let fbc = family.fiber_automorphism()?;
    let semidirect = SemidirectOverZ::from_fiber(&fbc)?;
    let group = target_group(target)?;
    let hom = match phi {
        Some(text) => {
            let images = text
                .split(';')
                .map(|s| Permutation::parse_cycles(group.degree(), s.trim()))
                .collect::<Result<Vec<_>>>()?;
            verify_hom(&Presentation::free("y", fbc.rank)?, &group, images)?
                .expect("free groups have no relators")
        }
        None => covers::free_surjection(fbc.rank, &group, budget)?,
    };
    let period = semidirect.cover_degree_for_target(&hom)?;
    if verify {
        let orbit = semidirect.precomposition_orbit(hom.images(), period as usize + 1);
        let minimal = orbit[1..period as usize]
            .iter()
            .all(|psi| psi.as_slice() != hom.images());
        verification(
            orbit[period as usize].as_slice() == hom.images() && minimal,
            "period is minimal",
        )?;
    }
    let first = covers::smallest_multiple_at_least(period, family.d() as u64);
    Ok(Report::ok(json!({
        "input": {"word": word, "target": target, "phi": phi},
        "alpha": Naming::with_prefix("y", fbc.rank).format_endomorphism(&fbc.alpha),
        "phi_images": to_value(&hom.images()),
        "period": period,
        "progression": {"first": first, "step": period},
        "verified": verify,
    })))
}

fn parse_endo(text: &str) -> Result<(Naming, Endomorphism)> {
    let naming = infer_endomorphism_naming(text)?;
    let endo = naming.parse_endomorphism(text)?;
    Ok((naming, endo))
}

fn rf_certificate(
    endo: &str,
    witnesses: &[String],
    prime: Option<u64>,
    verify: bool,
) -> Result<Report> {
    let (naming, theta) = parse_endo(endo)?;
    let (matrix, det) = rescert::abelianized_matrix(&theta);
    let rows: Vec<Vec<Value>> = (0..matrix.rows())
        .map(|i| matrix.row(i).iter().map(big).collect())
        .collect();
    let input = json!({"endo": endo, "witness": witnesses, "prime": prime});
    let mut body = json!({"input": input, "matrix": rows, "determinant": big(&det)});
    if let Some(p) = prime {
        let analysis = rescert::mod_p_analysis(&theta, &naming, p)?;
        let invertible = analysis.invertible;
        body["mod_p"] = to_value(&analysis);
        if !invertible {
            body["status"] = json!(format!("singular mod {p}"));
            return Ok(Report::no_result(body));
        }
    }
    if det == BigInt::from(0) {
        let form = smith_normal_form(&matrix);
        body["status"] = json!("singular");
        body["invariant_factors"] =
            json!(form.invariant_factors.iter().map(big).collect::<Vec<_>>());
        return Ok(Report::no_result(body));
    }
    let full = naming.extended("t")?;
    let words = witnesses
        .iter()
        .map(|w| full.parse(w))
        .collect::<Result<Vec<_>>>()?;
    let cert = rescert::rf_certificate_with_prime(&theta, &naming, &words, prime)?;
    if verify {
        cert.recheck(&theta, &naming)?;
    }
    body["status"] = json!("certified");
    body["certificate"] = to_value(&cert);
    body["verified"] = json!(verify);
    Ok(Report::ok(body))
}

fn rf_pullback(endo: &str, path: &Path, bound: usize, verify: bool) -> Result<Report> {
    let (naming, theta) = parse_endo(endo)?;
    let file: SubgroupFile = read_json(path)?;
    let h = FiniteIndexSubgroup::from_file(&file, &naming)?;
    let orbit = rescert::pullback_orbit(&theta, &h, bound)?;
    if verify {
        let last = orbit.chain.last().expect("orbit is nonempty");
        let back = rescert::preimage_subgroup(&theta, last)?;
        verification(
            back == orbit.chain[orbit.preperiod],
            "orbit closes at the preperiod",
        )?;
    }
    Ok(Report::ok(json!({
        "input": {"endo": endo, "subgroup": file, "bound": bound},
        "preperiod": orbit.preperiod,
        "period": orbit.period,
        "indices": orbit.chain.iter().map(FiniteIndexSubgroup::index).collect::<Vec<_>>(),
        "chain": orbit.chain.iter().map(|h| h.to_file(&naming)).collect::<Vec<_>>(),
        "returns_to_start": (orbit.preperiod == 0).then_some(orbit.period),
        "verified": verify,
    })))
}

fn magnus(args: &MagnusArgs, verify: bool) -> Result<Report> {
    let naming = Naming::infer(&[args.word.as_str()], false)?;
    let g = naming.parse(&args.word)?;
    let series = rescert::magnus_expand(&g, args.prime, args.degree)?;
    if verify {
        let inverse = rescert::magnus_expand(&g.inverse(), args.prime, args.degree)?;
        verification(
            series.mul(&inverse).is_one(),
            "expansion of g times expansion of g^-1 is 1",
        )?;
    }
    let terms: Vec<Value> = series
        .terms()
        .map(|(m, c)| {
            let mono: String = m.iter().map(|&i| format!("X{i}")).collect();
            json!({"monomial": if mono.is_empty() { "1".to_string() } else { mono }, "coefficient": c})
        })
        .collect();
    let mut body = json!({
        "input": {"word": args.word, "prime": args.prime, "degree": args.degree},
        "generators": naming.names(),
        "series": series.to_string(),
        "terms": terms,
        "verified": verify,
    });
    if args.separate {
        body["separating_degree"] = json!(rescert::separating_degree(
            &g,
            args.prime,
            rescert::DEFAULT_MAX_DEGREE
        )?);
    }
    Ok(Report::ok(body))
}
