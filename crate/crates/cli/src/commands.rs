use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use consta::codes::crt::{find_square_root, SquareSplit};
use consta::codes::{self, ChainCode};
use consta::distances::{self, rt_distribution_formula, rt_distribution_oracle};
use consta::{Error, GaloisRing, GrElement, Mode, QrElement, QuotientCtx, UnitKind};
use serde_json::{json, Value};

use crate::args::{Cli, CodeAction, Command, CrtAction};
use crate::output::Report;
use crate::suites;

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::RingInfo => ring_info(ring(cli)?),
        Command::Classify { value } => classify(cli, value.as_deref()),
        Command::Invert { value } => invert(cli, value.as_deref()),
        Command::Code { action } => code(cli, action),
        Command::Crt { action } => crt(cli, action),
        Command::Verify { suite } => suites::run(cli, *suite),
    }
}

pub fn ring(cli: &Cli) -> Result<&Arc<GaloisRing>> {
    cli.ring.as_ref().ok_or_else(|| anyhow!("--ring p,a,m[,f...] is required"))
}

pub fn element(ring: &GaloisRing, text: &str) -> Result<GrElement> {
    ring.parse_element(text).with_context(|| format!("bad element {text:?}"))
}

pub fn lambda(cli: &Cli) -> Result<GrElement> {
    let text = cli.lambda.as_deref().ok_or_else(|| anyhow!("--lambda is required"))?;
    element(ring(cli)?, text)
}

pub fn exponent(cli: &Cli) -> Result<usize> {
    cli.i.ok_or_else(|| anyhow!("--i is required"))
}

fn guard_hint(e: Error) -> anyhow::Error {
    match e {
        Error::GuardFailure(_) => anyhow!("{e} (pass --force to continue as an {})", crate::output::WATERMARK),
        other => other.into(),
    }
}

pub fn chain_ctx(cli: &Cli) -> Result<Arc<QuotientCtx>> {
    let ring = ring(cli)?.clone();
    let ctx = QuotientCtx::new(ring, lambda(cli)?, cli.s, Mode::Chain, cli.force).map_err(guard_hint)?;
    Ok(Arc::new(ctx))
}

pub fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("library reports serialize")
}

/// `c0;c1;...`, or `c0,c1,...` when every coefficient is an integer (m = 1); short words are
/// padded with zeros.
fn word(ctx: &QuotientCtx, text: &str) -> Result<QrElement> {
    let ring = ctx.ring();
    let parts: Vec<&str> = if text.contains(';') || ring.m() > 1 {
        text.split(';').collect()
    } else {
        text.split(',').collect()
    };
    let mut coeffs = parts
        .iter()
        .enumerate()
        .map(|(k, t)| element(ring, t).with_context(|| format!("coefficient {k} of the word")))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() > ctx.n() {
        bail!("word has {} coefficients, the length is {}", coeffs.len(), ctx.n());
    }
    coeffs.resize(ctx.n(), ring.zero());
    Ok(ctx.from_coeffs(coeffs)?)
}

pub fn render_word(w: &[GrElement]) -> String {
    w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

/// Polynomial notation, highest degree first.
pub fn render_poly(w: &[GrElement]) -> String {
    let mut terms = Vec::new();
    for (k, c) in w.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coeff = c.to_string();
        terms.push(match (k, coeff.as_str()) {
            (0, _) => coeff,
            (1, "1") => "x".into(),
            (1, _) => format!("{coeff}x"),
            (_, "1") => format!("x^{k}"),
            _ => format!("{coeff}x^{k}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn sorted_teich(ring: &GaloisRing) -> Vec<GrElement> {
    let mut teich = ring.teich().to_vec();
    teich.sort_by(|x, y| x.coeffs().iter().rev().cmp(y.coeffs().iter().rev()));
    teich
}

fn ring_name(ring: &GaloisRing) -> String {
    format!("GR({}^{},{})", ring.p(), ring.a(), ring.m())
}

fn ring_info(ring: &GaloisRing) -> Result<Report> {
    let (mut type0, mut type1) = (0u64, 0u64);
    for u in ring.units() {
        match ring.classify_unit(&u)?.kind {
            UnitKind::Type0 => type0 += 1,
            UnitKind::Type1 => type1 += 1,
        }
    }
    let teich = sorted_teich(ring);
    let classes = codes::count_type1_classes(ring).ok();
    let json = json!({
        "ring": ring_name(ring),
        "p": ring.p(),
        "a": ring.a(),
        "m": ring.m(),
        "modulus": ring.modulus(),
        "order": codes::PrimePower::new(ring.p(), ring.order_exponent()).to_string(),
        "teich": to_json(&teich),
        "teich_count": teich.len(),
        "xi": to_json(ring.xi()),
        "units": type0 + type1,
        "type0_units": type0,
        "type1_units": type1,
        "type1_classes": classes,
    });
    let listed: Vec<String> = teich.iter().map(|t| t.to_string()).collect();
    let text = format!(
        "{}: p = {}, a = {}, m = {}, modulus {:?}\n\
         order: {}\n\
         teich ({} elements): {{{}}}\n\
         xi: {}\n\
         units: {} ({} Type (1), {} Type (0))\n\
         Type (1) classes: {}\n",
        ring_name(ring),
        ring.p(),
        ring.a(),
        ring.m(),
        ring.modulus(),
        json["order"].as_str().unwrap_or_default(),
        teich.len(),
        listed.join(","),
        ring.xi(),
        type0 + type1,
        type1,
        type0,
        classes.map_or("-".into(), |c| c.to_string()),
    );
    Ok(Report { text: Some(text), ..Report::new(json) })
}

fn value_or_lambda(cli: &Cli, value: Option<&str>) -> Result<GrElement> {
    match value {
        Some(v) => element(ring(cli)?, v),
        None => lambda(cli).context("give an element or --lambda"),
    }
}

fn classify(cli: &Cli, value: Option<&str>) -> Result<Report> {
    let ring = ring(cli)?;
    let x = value_or_lambda(cli, value)?;
    let profile = ring.classify_unit(&x)?;
    let square = ring.is_square_unit(&x)?;
    let mut json = json!({
        "value": to_json(&x),
        "kind": to_json(&profile.kind),
        "xi0": to_json(&profile.xi0),
        "xi1": to_json(&profile.xi1),
        "z": to_json(&profile.z),
        "xi0_log": ring.dlog_teich(&profile.xi0)?,
        "square": square,
        "digits": to_json(&ring.teich_digits(&x).digits),
    });
    // chain admissibility for the requested s
    let chain = match QuotientCtx::new(ring.clone(), x, cli.s, Mode::Chain, false) {
        Ok(ctx) => json!({"admissible": true, "alpha": to_json(ctx.alpha()?)}),
        Err(e) => json!({"admissible": false, "reason": e.to_string()}),
    };
    json["chain"] = chain;
    Ok(Report::new(json))
}

fn invert(cli: &Cli, value: Option<&str>) -> Result<Report> {
    let ring = ring(cli)?;
    let x = value_or_lambda(cli, value)?;
    let inverse = ring.inv(&x)?;
    let kind = ring.classify_unit(&x)?.kind;
    let (formula, printed) = match kind {
        UnitKind::Type1 => (ring.type1_inverse_formula(&x), ring.type1_inverse_printed(&x)),
        UnitKind::Type0 => (ring.type0_inverse_formula(&x), ring.type0_inverse_printed(&x)),
    };
    let formula = formula.ok();
    let printed = printed.ok();
    let json = json!({
        "value": to_json(&x),
        "kind": to_json(&kind),
        "inverse": to_json(&inverse),
        "formula": formula.as_ref().map(to_json),
        "formula_correct": formula.as_ref() == Some(&inverse),
        "printed": printed.as_ref().map(to_json),
        "printed_correct": printed.as_ref() == Some(&inverse),
    });
    Ok(Report::new(json))
}

fn code(cli: &Cli, action: &CodeAction) -> Result<Report> {
    let ctx = chain_ctx(cli)?;
    let code = ChainCode::new(ctx.clone(), exponent(cli)?)?;
    let mut report = match action {
        CodeAction::Info => code_info(&code)?,
        CodeAction::Dual => code_dual(&code)?,
        CodeAction::Distances => code_distances(&code, cli.budget)?,
        CodeAction::RtDistribution => code_rt_distribution(&code, cli.budget)?,
        CodeAction::Enumerate => code_enumerate(&code, cli.budget)?,
    };
    report.watermark = ctx.guard_failure().is_some();
    Ok(report)
}

fn code_info(code: &ChainCode) -> Result<Report> {
    let ctx = code.ctx();
    let mut json = to_json(&code.report());
    json["n"] = json!(ctx.n());
    json["nilpotency_index"] = json!(code.nilpotency());
    json["zero_code"] = json!(code.is_zero_code());
    json["whole_ring"] = json!(code.is_whole_ring());
    json["generator_poly"] = json!(render_poly(code.generator().coeffs()));
    json["echelon_rows"] = json!(code.echelon().rows().len());
    json["guard"] = match ctx.guard_failure() {
        Some(w) => json!(w.to_string()),
        None => json!("residue quartic irreducible"),
    };
    Ok(Report::new(json))
}

fn code_dual(code: &ChainCode) -> Result<Report> {
    let dual = code.dual()?;
    let check = codes::verify_dual(code, &dual)?;
    let json = json!({
        "code": to_json(&code.report()),
        "dual": to_json(&dual.report()),
        "dual_generator_poly": render_poly(dual.generator().coeffs()),
        "check": to_json(&check),
    });
    let text = format!(
        "code: i = {}, lambda = {}, |C| = {}\n\
         dual: i = {}, lambda = {}, alpha = {}, |C^perp| = {}\n\
         dual generator: {}\n\
         orthogonal: {}, |C||C^perp| = {} (ambient {}), certified: {}\n",
        code.exponent(),
        code.ctx().lambda(),
        code.cardinality(),
        dual.exponent(),
        dual.ctx().lambda(),
        dual.ctx().alpha()?,
        dual.cardinality(),
        render_poly(dual.generator().coeffs()),
        check.orthogonal,
        check.cardinality_product,
        check.ambient,
        check.holds,
    );
    Ok(Report { text: Some(text), failed: !check.holds, ..Report::new(json) })
}

fn agreement(formula: Option<usize>, brute: Option<usize>) -> Value {
    match (formula, brute) {
        (Some(f), Some(b)) => json!(f == b),
        _ => Value::Null,
    }
}

fn code_distances(code: &ChainCode, budget: u64) -> Result<Report> {
    let scan = if code.cardinality().fits_within(budget) {
        Some(distances::scan(code, budget)?)
    } else {
        None
    };
    let rt_formula = distances::d_rt_formula(code).value;
    let hamming = distances::d_h_formula(code);
    let (h_formula, h_params, h_note) = match &hamming {
        Ok(r) => (Some(r.value), r.hamming_params, None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let rt_brute = scan.as_ref().map(|s| s.d_rt);
    let h_brute = scan.as_ref().map(|s| s.d_h);
    let json = json!({
        "i": code.exponent(),
        "cardinality": code.cardinality().to_string(),
        "enumerated": scan.as_ref().map(|s| s.codewords),
        "rt": {
            "formula": rt_formula,
            "bruteforce": rt_brute,
            "agree": agreement(Some(rt_formula), rt_brute),
        },
        "hamming": {
            "formula": h_formula,
            "params": h_params.map(|p| to_json(&p)),
            "note": h_note,
            "bruteforce": h_brute,
            "agree": agreement(h_formula, h_brute),
        },
    });
    let show = |v: Option<usize>| v.map_or("-".to_string(), |d| d.to_string());
    let verdict = |f: Option<usize>, b: Option<usize>| match (f, b) {
        (Some(f), Some(b)) if f == b => "agree",
        (Some(_), Some(_)) => "DISAGREE",
        _ => "not compared",
    };
    let mut text = format!(
        "RT distance: formula {}, enumeration {} ({})\nHamming distance: formula {}, enumeration {} ({})\n",
        rt_formula,
        show(rt_brute),
        verdict(Some(rt_formula), rt_brute),
        show(h_formula),
        show(h_brute),
        verdict(h_formula, h_brute),
    );
    if scan.is_none() {
        text.push_str(&format!("enumeration skipped: {} codewords exceed the budget {budget}\n", code.cardinality()));
    }
    let failed = rt_brute.is_some_and(|b| b != rt_formula) || matches!((h_formula, h_brute), (Some(f), Some(b)) if f != b);
    Ok(Report { text: Some(text), failed, ..Report::new(json) })
}

fn code_rt_distribution(code: &ChainCode, budget: u64) -> Result<Report> {
    let formula = rt_distribution_formula(code);
    let (oracle, method) = rt_distribution_oracle(code, budget)?;
    let agree = formula == oracle;
    let json = json!({
        "i": code.exponent(),
        "cardinality": code.cardinality().to_string(),
        "distribution": to_json(&formula),
        "oracle_method": to_json(&method),
        "agree": agree,
    });
    let rows = formula.rows();
    let mut text = format!(
        "RT weight distribution of C_{} (|C| = {}), checked by {}: {}\n",
        code.exponent(),
        code.cardinality(),
        json["oracle_method"].as_str().unwrap_or_default(),
        if agree { "agree" } else { "DISAGREE" }
    );
    for (j, count) in &rows {
        text.push_str(&format!("{j:>4}  {count}\n"));
    }
    let mut csv = vec![vec!["j".to_string(), "A_j".to_string()]];
    csv.extend(rows.into_iter().map(|(j, c)| vec![j.to_string(), c]));
    Ok(Report { text: Some(text), csv: Some(csv), failed: !agree, ..Report::new(json) })
}

fn code_enumerate(code: &ChainCode, budget: u64) -> Result<Report> {
    let words = code.echelon().codewords(budget)?;
    let json = json!({
        "i": code.exponent(),
        "count": words.len(),
        "codewords": to_json(&words),
    });
    let text: String = words.iter().map(|w| render_word(w) + "\n").collect();
    let csv = words.iter().map(|w| w.iter().map(|c| c.to_string()).collect()).collect();
    Ok(Report { text: Some(text), csv: Some(csv), ..Report::new(json) })
}

pub fn square_split(cli: &Cli) -> Result<SquareSplit> {
    let ring = ring(cli)?.clone();
    let lambda = lambda(cli)?;
    let delta = match &cli.delta {
        Some(d) => element(&ring, d)?,
        None => find_square_root(&ring, &lambda).ok_or_else(|| anyhow!("lambda = {lambda} is not a square"))?,
    };
    let ctx = QuotientCtx::new(ring, lambda, cli.s, Mode::Generic, false)?;
    Ok(SquareSplit::new(Arc::new(ctx), delta)?)
}

fn crt(cli: &Cli, action: &CrtAction) -> Result<Report> {
    let split = square_split(cli)?;
    let report = match action {
        CrtAction::Idempotents => {
            let (e1, e2) = split.idempotents();
            let json = json!({
                "delta": to_json(split.delta()),
                "e1": to_json(e1.coeffs()),
                "e2": to_json(e2.coeffs()),
                "e1_poly": render_poly(e1.coeffs()),
                "e2_poly": render_poly(e2.coeffs()),
            });
            let text = format!(
                "delta = {}\ne1 = {}\ne2 = {}\n",
                split.delta(),
                render_poly(e1.coeffs()),
                render_poly(e2.coeffs())
            );
            Report { text: Some(text), ..Report::new(json) }
        }
        CrtAction::Split { word: w } => {
            let c = word(split.ctx(), w)?;
            let (c1, c2) = split.split(&c)?;
            let json = json!({"first": to_json(c1.coeffs()), "second": to_json(c2.coeffs())});
            let text = format!("first: {}\nsecond: {}\n", render_word(c1.coeffs()), render_word(c2.coeffs()));
            Report { text: Some(text), ..Report::new(json) }
        }
        CrtAction::Join { first, second } => {
            let c1 = word(split.plus(), first)?;
            let c2 = word(split.minus(), second)?;
            let c = split.join(&c1, &c2)?;
            let json = json!({"word": to_json(c.coeffs())});
            Report { text: Some(render_word(c.coeffs()) + "\n"), ..Report::new(json) }
        }
    };
    Ok(report)
}
