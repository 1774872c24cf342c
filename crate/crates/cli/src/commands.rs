use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use pslrack::assoc::{ass_descriptor, h2_quandle, involution_centralizer_check, AssocError};
use pslrack::config::{ConfigError, Limits};
use pslrack::conjugacy::{
    all_classes, class_generates, class_generates_by_rule, class_info, representative, ClassDescriptor, ClassType,
    ConjugacyError,
};
use pslrack::field::{prime_power, Field};
use pslrack::finite::MAX_TABLE_ORDER;
use pslrack::fpgroup::{
    central_quotient, parse_presentation, perm_group_analysis, todd_coxeter, FpError, ParseError, RegularGroup,
    A5_TRIANGLE, A6_COVER_ROBERTSON, A6_COVER_SCHUR,
};
use pslrack::matrix::{MatrixError, MatrixGroup};
use pslrack::taxonomy::{
    brute_force_verdict, classify_subracks, cross_validate, default_mode, minimality_verdict, OracleMode, TaxonomyError,
};
use pslrack::verify::{run_check, verify_field, CheckResult, CheckStatus};

use crate::output::{table, to_value, yes_no, OracleStatus, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad q range {0:?}: use `Q`, `A-B` or a comma-separated list")]
    BadRange(String),
    #[error("{0}")]
    Usage(String),
}

/// Which oracle backs a subrack cross-check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Auto,
    Lattice,
    PowerSet,
    Seeded,
}

fn psl_order(f: &Field) -> u64 {
    let q = f.q() as u64;
    q * (q * q - 1) / f.e() as u64
}

fn tabulable(f: &Field) -> bool {
    psl_order(f) <= MAX_TABLE_ORDER as u64
}

/// Checks embedded in a report leave out timings so reruns are identical.
fn check_json(c: &CheckResult, timings: bool) -> Value {
    let mut v = json!({ "name": c.name, "status": c.status, "detail": c.detail });
    if timings {
        v["millis"] = json!(c.millis as u64);
    }
    v
}

fn checks_status(checks: &[CheckResult]) -> OracleStatus {
    checks.iter().fold(OracleStatus::SymbolicOnly, |s, c| {
        s.join(match c.status {
            CheckStatus::Passed => OracleStatus::OracleVerified,
            CheckStatus::Failed => OracleStatus::OracleFailed,
            CheckStatus::Skipped => OracleStatus::SymbolicOnly,
        })
    })
}

fn class_arg(f: &Field, id: &str) -> Result<ClassDescriptor, CliError> {
    Ok(ClassDescriptor::parse_id(f, id)?)
}

fn nontrivial_classes(f: &Field, id: Option<&str>) -> Result<Vec<ClassDescriptor>, CliError> {
    match id {
        Some(id) => Ok(vec![class_arg(f, id)?]),
        None => {
            Ok(all_classes(f).iter().filter(|c| c.class_type != ClassType::Identity).map(|c| c.descriptor).collect())
        }
    }
}

pub fn classes(f: &Field, limits: &Limits) -> Result<Report, CliError> {
    let grp = MatrixGroup::psl(f);
    let oracle = tabulable(f);
    let mut rows = Vec::new();
    let mut generation_ok = true;
    for c in all_classes(f).iter() {
        let generates = class_generates_by_rule(f, &c.descriptor);
        if oracle && c.class_type != ClassType::Identity {
            generation_ok &= class_generates(f, &c.descriptor)? == generates;
        }
        rows.push(json!({
            "id": c.id,
            "label": c.descriptor.label(f),
            "type": c.class_type.name(),
            "size": c.size,
            "order": c.order,
            "char_poly": c.char_poly.display(f),
            "real": c.real,
            "generates": generates,
            "representative": grp.format(&representative(f, &c.descriptor)),
        }));
    }
    let checks: Vec<CheckResult> =
        ["class_partition", "reality"].iter().filter_map(|n| run_check(n, f, limits)).collect();
    let mut status = checks_status(&checks);
    if oracle {
        status = status.join(OracleStatus::from_check(generation_ok));
    }
    let head = ["id", "label", "type", "size", "order", "char poly", "real", "generates"];
    let cells = |r: &Value| -> Vec<String> {
        let s = |k: &str| match &r[k] {
            Value::String(x) => x.clone(),
            Value::Bool(b) => yes_no(*b),
            v => v.to_string(),
        };
        ["id", "label", "type", "size", "order", "char_poly", "real", "generates"].iter().map(|k| s(k)).collect()
    };
    let body: Vec<Vec<String>> = rows.iter().map(cells).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(head).expect("in-memory csv");
    for r in &body {
        w.write_record(r).expect("in-memory csv");
    }
    let csv = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8");
    let mut human = table(&head, &body);
    if oracle {
        human += &format!("\ngeneration flags by closure: {}\n", if generation_ok { "agree" } else { "DISAGREE" });
    }
    for c in &checks {
        human += &format!("{}: {:?} ({})\n", c.name, c.status, c.detail);
    }
    Ok(Report {
        command: "classes",
        field: Some(f.clone()),
        status,
        payload: json!({
            "q": f.q(),
            "group_order": psl_order(f),
            "classes": rows,
            "checks": checks.iter().map(|c| check_json(c, false)).collect::<Vec<_>>(),
            "generation_by_closure": if oracle { json!(generation_ok) } else { Value::Null },
        }),
        human,
        csv: Some(csv),
    })
}

fn oracle_mode(f: &Field, cd: &ClassDescriptor, mode: ModeArg, limits: &Limits) -> OracleMode {
    match mode {
        ModeArg::Auto => default_mode(f, cd, limits.lattice_bound),
        ModeArg::Lattice => OracleMode::Lattice,
        ModeArg::PowerSet => OracleMode::PowerSet,
        ModeArg::Seeded => OracleMode::Seeded,
    }
}

pub fn subracks(f: &Field, id: &str, verify: bool, mode: ModeArg, limits: &Limits) -> Result<Report, CliError> {
    let cd = class_arg(f, id)?;
    let report = classify_subracks(f, &cd)?;
    let validation = if verify { Some(cross_validate(f, &cd, oracle_mode(f, &cd, mode, limits))?) } else { None };
    let status = validation.as_ref().map_or(OracleStatus::SymbolicOnly, |v| OracleStatus::from_check(v.passed));

    let mut human = format!(
        "class {} ({}), size {}, element order {}, kind {:?}\n\n",
        report.class_id,
        cd.label(f),
        report.class_size,
        report.order,
        report.kind
    );
    let mut rows = Vec::new();
    for fam in &report.families {
        let inst: Vec<String> = fam
            .instances
            .iter()
            .map(|i| {
                let mut s = format!("{} [{}] |Y|={}", i.params, i.subgroup, i.size);
                if !i.proper {
                    s += " (whole class)";
                }
                if i.supplement {
                    s += " (supplement)";
                }
                s
            })
            .collect();
        let inst = if inst.is_empty() { "-".to_string() } else { inst.join("; ") };
        rows.push(vec![
            fam.item.to_string(),
            fam.subgroup.clone(),
            fam.content.clone(),
            yes_no(fam.condition_holds),
            inst,
        ]);
    }
    human += &table(&["item", "subgroup", "content", "occurs", "instances"], &rows);
    human += &format!("\nminimality: {:?} ({})\n", report.minimality.verdict, report.minimality.reason);
    if let Some(v) = &validation {
        human += &format!(
            "\ncross-check ({:?}, {}): {} subracks, {} unmatched, {} instances unwitnessed: {}\n",
            v.mode,
            if v.exhaustive { "exhaustive" } else { "partial" },
            v.subracks,
            v.unmatched.len(),
            v.unwitnessed().count(),
            if v.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(Report {
        command: "subracks",
        field: Some(f.clone()),
        status,
        payload: json!({ "report": to_value(&report), "validation": validation.as_ref().map(to_value) }),
        human,
        csv: None,
    })
}

pub fn minimal(f: &Field, id: Option<&str>) -> Result<Report, CliError> {
    let oracle = tabulable(f);
    let mut status = OracleStatus::SymbolicOnly;
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for cd in nontrivial_classes(f, id)? {
        let v = minimality_verdict(f, &cd)?;
        let brute = if oracle { Some(brute_force_verdict(f, &cd)?) } else { None };
        if let Some(b) = brute {
            status = status.join(OracleStatus::from_check(b == v.verdict));
        }
        rows.push(vec![
            cd.id(),
            format!("{:?}", v.verdict),
            brute.map_or("-".into(), |b| format!("{b:?}")),
            v.reason.clone(),
        ]);
        out.push(json!({
            "class_id": cd.id(),
            "verdict": v.verdict,
            "rule": v.rule,
            "reason": v.reason,
            "brute_force": brute,
        }));
    }
    Ok(Report {
        command: "minimal",
        field: Some(f.clone()),
        status,
        payload: json!({ "q": f.q(), "classes": out }),
        human: table(&["class", "verdict", "brute force", "reason"], &rows),
        csv: None,
    })
}

pub fn ass(f: &Field, id: &str) -> Result<Report, CliError> {
    let cd = class_arg(f, id)?;
    let d = ass_descriptor(f, &cd)?;
    // |D_X| = |PSL(2,q)| * |relative multiplier|
    let stem_ok = d.dx_order as u64 == psl_order(f) * d.rel_multiplier.order();
    let consistent = d.rel_multiplier == d.symbolic_rel_multiplier && d.basepoint_independent && stem_ok;
    let rows = vec![
        vec!["covering group".into(), format!("{} (order {})", d.covering_label, d.cover_order)],
        vec!["Schur multiplier order".into(), d.multiplier_order.to_string()],
        vec!["mu image order".into(), d.mu_image_order.to_string()],
        vec!["relative multiplier".into(), d.rel_multiplier.to_string()],
        vec!["case table".into(), d.symbolic_rel_multiplier.to_string()],
        vec!["D_X".into(), format!("{} (order {})", d.dx_identification, d.dx_order)],
        vec!["Ass X".into(), d.ass_identification.clone()],
        vec!["H_2".into(), d.h2_invariants.to_string()],
        vec![
            "basepoints".into(),
            format!("{} checked, independent: {}", d.basepoints_checked, yes_no(d.basepoint_independent)),
        ],
        vec!["|D_X| = |G| |rel|".into(), yes_no(stem_ok)],
    ];
    let mut payload = to_value(&d);
    payload["stem_order_consistent"] = json!(stem_ok);
    Ok(Report {
        command: "ass",
        field: Some(f.clone()),
        status: OracleStatus::from_check(consistent),
        payload,
        human: format!("class {}\n\n{}", d.class_id, table(&["quantity", "value"], &rows)),
        csv: None,
    })
}

pub fn h2(f: &Field, id: &str) -> Result<Report, CliError> {
    let cd = class_arg(f, id)?;
    let h = h2_quandle(f, &cd)?;
    let info = class_info(f, &cd);
    let q = f.q();
    let involutions = q % 2 == 1 && info.order == 2;
    let dihedral = if involutions && q >= 5 { Some(involution_centralizer_check(f)?) } else { None };
    let status = match &dihedral {
        Some(d) => OracleStatus::from_check(d.is_dihedral && d.matches_q_pm_1),
        None => OracleStatus::SymbolicOnly,
    };
    let mut human = format!("H_2 of class {} at q = {q}: {h}\n", cd.id());
    if q == 4 || q == 9 {
        human += "computed from the centralizer in D_X, beyond the closed-form range\n";
    }
    if let Some(d) = &dihedral {
        human += &format!(
            "involution centralizer: order {}, dihedral: {}, order q+-1: {}\n",
            d.centralizer_order,
            yes_no(d.is_dihedral),
            yes_no(d.matches_q_pm_1)
        );
    }
    Ok(Report {
        command: "h2",
        field: Some(f.clone()),
        status,
        payload: json!({
            "class_id": cd.id(),
            "q": q,
            "h2_invariants": to_value(&h),
            "h2": h.to_string(),
            "extension": q == 4 || q == 9,
            "involution_centralizer": dihedral.as_ref().map(to_value),
        }),
        human,
        csv: None,
    })
}

/// Named presentations shipped with the library.
pub fn builtin_presentation(name: &str) -> Option<&'static str> {
    match name {
        "a6cover" | "a6cover-robertson" => Some(A6_COVER_ROBERTSON),
        "a6cover-schur" => Some(A6_COVER_SCHUR),
        "a5" => Some(A5_TRIANGLE),
        _ => None,
    }
}

pub struct FpOptions {
    pub cosets: bool,
    pub classes: bool,
    pub quotient: Option<usize>,
}

pub fn fpgroup(source: &str, opts: &FpOptions, limits: &Limits) -> Result<Report, CliError> {
    let text = match source.strip_prefix('@') {
        Some(name) => builtin_presentation(name)
            .ok_or_else(|| CliError::Usage(format!("unknown built-in presentation @{name}")))?
            .to_string(),
        None => std::fs::read_to_string(source).map_err(|e| CliError::Io { path: source.into(), source: e })?,
    };
    let p = parse_presentation(&text).map_err(|e| CliError::Parse { path: source.into(), source: e })?;
    let ct = todd_coxeter(&p, &[], limits.coset_limit)?;
    let closed = ct.is_closed_under(&p);
    let (index, defined) = (ct.index(), ct.total_defined);
    let mut human = format!("{p}\n\norder: {index}\n");
    let mut payload = json!({
        "presentation": p.to_string(),
        "generators": p.generators,
        "relator_count": p.relators.len(),
        "order": index,
        "table_closed": closed,
        "cosets": Value::Null,
        "classes": Value::Null,
        "quotient": Value::Null,
    });
    if opts.cosets {
        payload["cosets"] = json!({ "index": index, "defined": defined });
        human += &format!("cosets: {index} live, {defined} defined\n");
    }
    if opts.classes || opts.quotient.is_some() {
        let g = RegularGroup::from_table(p.clone(), ct)?;
        let a = perm_group_analysis(&g)?;
        if opts.classes {
            let list: Vec<Value> = a
                .classes
                .iter()
                .map(|c| {
                    json!({
                        "representative": p.format_word(&g.element_word(c.representative)),
                        "size": c.size,
                        "element_order": c.element_order,
                    })
                })
                .collect();
            payload["classes"] = json!({
                "count": a.classes.len(),
                "centre_order": a.centre.len(),
                "centre_cyclic": a.centre_cyclic,
                "derived_order": a.derived_order,
                "size_counts": size_counts(&a.class_sizes),
                "list": list,
            });
            human += &format!(
                "centre: order {}{}, derived subgroup: order {}\nclasses: {}\n\n",
                a.centre.len(),
                if a.centre_cyclic { " (cyclic)" } else { "" },
                a.derived_order,
                a.classes.len()
            );
            let rows: Vec<Vec<String>> = a
                .classes
                .iter()
                .map(|c| {
                    let w = p.format_word(&g.element_word(c.representative));
                    vec![if w.is_empty() { "1".into() } else { w }, c.size.to_string(), c.element_order.to_string()]
                })
                .collect();
            human += &table(&["representative", "size", "order"], &rows);
        }
        if let Some(n) = opts.quotient {
            let cq = central_quotient(&g, &a, n)?;
            let fib: Vec<Value> = cq
                .fibration(&a)
                .iter()
                .map(|(&(s, t), &k)| json!({ "source_size": s, "image_size": t, "count": k }))
                .collect();
            let mut sizes: Vec<usize> = cq.classes.iter().map(|c| c.size).collect();
            sizes.sort_unstable();
            payload["quotient"] = json!({
                "n": n,
                "order": cq.order,
                "class_sizes": sizes,
                "size_counts": size_counts(&cq.class_sizes),
                "fibration": fib,
            });
            human += &format!(
                "\nquotient by the central subgroup of order {n}: order {}\nclass sizes: {sizes:?}\n",
                cq.order
            );
            let rows: Vec<Vec<String>> = cq
                .fibration(&a)
                .iter()
                .map(|(&(s, t), &k)| vec![s.to_string(), t.to_string(), k.to_string()])
                .collect();
            human += &table(&["class size", "image size", "classes"], &rows);
        }
    }
    Ok(Report { command: "fpgroup", field: None, status: OracleStatus::from_check(closed), payload, human, csv: None })
}

fn size_counts(m: &BTreeMap<usize, usize>) -> Vec<Value> {
    m.iter().map(|(&s, &k)| json!({ "size": s, "count": k })).collect()
}

/// `Q`, `A-B` (or `A..B`, `A..=B`) and comma-separated lists of those.
/// Values from a range that are not prime powers are skipped; a value given
/// on its own must be one.
pub fn parse_q_range(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::BadRange(text.into());
    let mut qs = Vec::new();
    for part in text.split(',').map(str::trim) {
        let bounds = part.split_once("..=").or_else(|| part.split_once("..")).or_else(|| part.split_once('-'));
        match bounds {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                qs.extend((a.max(2)..=b).filter(|&q| prime_power(q).is_some()));
            }
            None => {
                let q: u32 = part.parse().map_err(|_| bad())?;
                if prime_power(q).is_none() {
                    return Err(ConfigError::NotPrimePower { q }.into());
                }
                qs.push(q);
            }
        }
    }
    qs.sort_unstable();
    qs.dedup();
    if qs.is_empty() {
        return Err(bad());
    }
    Ok(qs)
}

pub fn verify(range: &str, limits: &Limits, timings: bool) -> Result<Report, CliError> {
    let fields: Vec<Field> = parse_q_range(range)?.into_iter().map(|q| limits.field(q)).collect::<Result<_, _>>()?;
    let mut reports = Vec::new();
    let mut human = String::new();
    let mut passed = true;
    for f in &fields {
        let r = verify_field(f, limits);
        passed &= r.passed;
        human += &format!("q = {}: {}\n", r.q, if r.passed { "pass" } else { "FAIL" });
        let rows: Vec<Vec<String>> = r
            .checks
            .iter()
            .map(|c| {
                let mut row = vec![c.name.to_string(), format!("{:?}", c.status).to_lowercase(), c.detail.clone()];
                if timings {
                    row.push(format!("{} ms", c.millis));
                }
                row
            })
            .collect();
        let head: &[&str] =
            if timings { &["check", "status", "detail", "time"] } else { &["check", "status", "detail"] };
        human += &table(head, &rows);
        human += "\n";
        reports.push(json!({
            "q": r.q,
            "field": crate::output::field_json(f),
            "passed": r.passed,
            "checks": r.checks.iter().map(|c| check_json(c, timings)).collect::<Vec<_>>(),
        }));
    }
    human += &format!("{}\n", if passed { "all checks passed" } else { "some checks FAILED" });
    Ok(Report {
        command: "verify",
        field: if fields.len() == 1 { Some(fields[0].clone()) } else { None },
        status: OracleStatus::from_check(passed),
        payload: json!({ "qs": fields.iter().map(Field::q).collect::<Vec<_>>(), "passed": passed, "reports": reports }),
        human,
        csv: None,
    })
}
