//! Named verification suites for the `verify` command.

use anyhow::{bail, Result};
use heckekit::coxeter::Element;
use heckekit::field::Field;
use heckekit::hecke::HeckeElement;
use heckekit::homotopy::{convolve, hom_dims, split_maps, verify_equivalence, Complex, HomFlavor};
use heckekit::locale::LocallyClosedSubset;
use heckekit::recperv::{
    build_costandard, build_standard, elementary_standard, inverse_pair_reductions, perverse_check, rex_cone,
    simple_candidate, simple_candidate_check, standard_costandard,
};
use heckekit::requiv::{hw_axiom_check, re_hom_expected, re_hom_table, ringel_costandard, tilting_multiplicities_hold};
use heckekit::soergelcalc::BimodMap;
use rayon::prelude::*;
use serde_json::json;

use crate::commands::Env;
use crate::report::{CheckLine, Report};

pub const SUITES: &[&str] = &[
    "groth", "hom-dn", "hom-dd", "relations", "inverses", "perverse", "simple", "rexcone", "re-hom", "ringel", "hw",
    "tilting",
];

pub fn run<F: Field>(env: &Env<F>, suite: &str) -> Result<Report> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut r = Report::new("verify");
    for name in &names {
        let outcome = match *name {
            "groth" => groth(env),
            "hom-dn" => hom_dn(env),
            "hom-dd" => hom_dd(env),
            "relations" => Ok(relations(env)),
            "inverses" => inverses(env),
            "perverse" => perverse(env),
            "simple" => simple(env),
            "rexcone" => rexcones(env),
            "re-hom" => re_hom(env),
            "ringel" => ringel(env),
            "hw" => hw(env),
            "tilting" => tilting_multiplicities_hold(&env.hecke)
                .map(|ok| vec![CheckLine::new("tilting multiplicities", ok, "")])
                .map_err(Into::into),
            other => bail!("unknown suite {other:?}; available: all, {}", SUITES.join(", ")),
        };
        // A suite that errors out counts as one failed check.
        let lines = outcome.unwrap_or_else(|e| vec![CheckLine::new("suite did not complete", false, format!("{e:#}"))]);
        let passed = lines.iter().filter(|l| l.passed).count();
        r.line(format!("{name}: {passed}/{} checks pass", lines.len()));
        for l in lines {
            r.check(CheckLine::new(format!("{name}: {}", l.name), l.passed, l.detail));
        }
    }
    r.result = json!({"suites": names, "type": env.sys().type_name(), "window": env.cfg.window});
    Ok(r)
}

fn elements<F: Field>(env: &Env<F>) -> Result<Vec<Element>> {
    Ok(env.sys().enumerate(heckekit::recperv::ELEMENT_CAP)?)
}

fn pairs<F: Field>(env: &Env<F>) -> Result<Vec<(Element, Element)>> {
    let es = elements(env)?;
    Ok(es.iter().flat_map(|x| es.iter().map(move |y| (x.clone(), y.clone()))).collect())
}

fn name<F: Field>(env: &Env<F>, w: &Element) -> String {
    env.sys().elem_string(w)
}

/// Runs `f` over `items` in parallel and keeps the input order.
fn fan_out<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> heckekit::error::Result<CheckLine> + Sync,
) -> Result<Vec<CheckLine>> {
    let out: heckekit::error::Result<Vec<CheckLine>> = items.par_iter().map(&f).collect();
    Ok(out?)
}

fn groth<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, hecke, sys) = (&env.ctx, &env.hecke, env.sys());
    let mut out = Vec::new();
    for s in sys.generators() {
        let ds = elementary_standard(ctx, s);
        let sq = convolve(ctx.bimod(), &ds, &ds).character(hecke);
        let want = Complex::<F>::unit()
            .character(hecke)
            .add(&ds.shift_internal(-1).character(hecke))
            .sub(&ds.shift_internal(1).character(hecke));
        out.push(CheckLine::new(format!("[Δ_{}]² relation", sys.word_string(&[s])), sq == want, ""));
    }
    let es = elements(env)?;
    out.extend(fan_out(&es, |w| {
        let d = build_standard(ctx, w)?;
        let ok = d.verify() && d.current.character(hecke) == HeckeElement::basis(w.clone());
        Ok(CheckLine::new(format!("char Δ_{}", name(env, w)), ok, ""))
    })?);
    let additive: Vec<_> = pairs(env)?
        .into_iter()
        .filter(|(x, y)| sys.multiply(x, y).length() == x.length() + y.length())
        .collect();
    out.extend(fan_out(&additive, |(x, y)| {
        let dx = build_standard(ctx, x)?.current;
        let dy = build_standard(ctx, y)?.current;
        let dxy = build_standard(ctx, &sys.multiply(x, y))?.current;
        let ok = convolve(ctx.bimod(), &dx, &dy).character(hecke) == dxy.character(hecke);
        Ok(CheckLine::new(format!("[Δ_{}] = [Δ_{} ⋆ Δ_{}]", name(env, &sys.multiply(x, y)), name(env, x), name(env, y)), ok, ""))
    })?);
    Ok(out)
}

fn hom_dn<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, win) = (&env.ctx, env.cfg.window);
    fan_out(&pairs(env)?, |(x, y)| {
        let dx = build_standard(ctx, x)?.current;
        let ny = build_costandard(ctx, y)?.current;
        let t = hom_dims(ctx, &dx, &ny, HomFlavor::Bimodule, -win..=win, -win..=win)?;
        let bad: Vec<String> = t
            .iter()
            .filter(|(&(n, m), &d)| {
                let want = if x == y && m == -n && m >= 0 && m % 2 == 0 { ctx.realization().graded_dim(m) } else { 0 };
                d != want
            })
            .map(|((n, m), d)| format!("<{n}>[{m}] = {d}"))
            .collect();
        Ok(CheckLine::new(format!("Hom(Δ_{}, ∇_{})", name(env, x), name(env, y)), bad.is_empty(), bad.join(", ")))
    })
}

fn hom_dd<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, sys, win) = (&env.ctx, env.sys(), env.cfg.window);
    fan_out(&pairs(env)?, |(w, y)| {
        let dw = build_standard(ctx, w)?.current;
        let dy = build_standard(ctx, y)?.current;
        let t = hom_dims(ctx, &dw, &dy, HomFlavor::Bimodule, -win..=win, 0..=0)?;
        let want = |n: i32| usize::from(sys.bruhat_leq(w, y) && n == y.length() as i32 - w.length() as i32);
        let bad: Vec<String> =
            t.iter().filter(|(&(n, _), &d)| d != want(n)).map(|((n, _), d)| format!("<{n}> = {d}")).collect();
        Ok(CheckLine::new(format!("Hom(Δ_{}, Δ_{})", name(env, w), name(env, y)), bad.is_empty(), bad.join(", ")))
    })
}

fn relations<F: Field>(env: &Env<F>) -> Vec<CheckLine> {
    let b = env.ctx.bimod();
    let sys = env.sys();
    let mut out = Vec::new();
    for s in sys.generators() {
        let l = sys.word_string(&[s]);
        let id = BimodMap::identity(&[s]);
        let mut push = |what: &str, ok: bool| out.push(CheckLine::new(format!("{what} ({l})"), ok, ""));
        push("barbell", b.dot(s).compose(&b.enddot(s)) == b.poly_map(b.realization().alpha(s)));
        push("needle", b.merge(s).compose(&b.split(s)).compose(&b.enddot(s)).is_zero());
        push("unit", b.merge(s).compose(&b.tensor_id_left(&[s], &b.enddot(s))) == id);
        push("counit", b.tensor_id_left(&[s], &b.dot(s)).compose(&b.split(s)) == id);
        let (pa, ia, pb, ib) = split_maps(b, &[s, s], 0);
        let ok = pa.compose(&ia) == id
            && pb.compose(&ib) == id
            && ia.compose(&pa).add(&ib.compose(&pb)) == BimodMap::identity(&[s, s]);
        push("B_sB_s splitting", ok);
    }
    out
}

fn inverses<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let ctx = &env.ctx;
    fan_out(&elements(env)?, |w| {
        let (dn, nd) = inverse_pair_reductions(ctx, w)?;
        let ok = [&dn, &nd].iter().all(|r| r.verify() && r.current == Complex::unit());
        Ok(CheckLine::new(format!("Δ_w ⋆ ∇_w⁻¹ and ∇_w⁻¹ ⋆ Δ_w at {}", name(env, w)), ok, ""))
    })
}

fn perverse<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, win) = (&env.ctx, env.cfg.window.max(6));
    fan_out(&pairs(env)?, |(w, y)| {
        let c = standard_costandard(ctx, w, y)?;
        let r = perverse_check(ctx, &c, None, win)?;
        let r1 = perverse_check(ctx, &c.shift_angle(1), None, win)?;
        Ok(CheckLine::new(format!("Δ_{} ⋆ ∇_{}", name(env, w), name(env, y)), r.is_perverse() && r1.is_perverse(), ""))
    })
}

fn simple<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, hecke, win) = (&env.ctx, &env.hecke, env.cfg.window.max(6));
    fan_out(&elements(env)?, |w| {
        let c = simple_candidate(ctx, hecke, w.canonical_word())?;
        let ev = simple_candidate_check(ctx, &c, w, win)?;
        let ok = ev.passed() && c.character(hecke) == hecke.kl_basis(w)?;
        Ok(CheckLine::new(format!("candidate at {}", name(env, w)), ok, ""))
    })
}

fn rexcones<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let sys = env.sys();
    let mut jobs = Vec::new();
    for w in elements(env)? {
        let rex = sys.reduced_words(&w)?;
        for b in rex.iter().skip(1) {
            jobs.push((rex[0].clone(), b.clone()));
        }
    }
    fan_out(&jobs, |(a, b)| {
        let label = format!("{} -> {}", sys.word_string(a), sys.word_string(b));
        match rex_cone(&env.ctx, a, b) {
            Ok(r) => Ok(CheckLine::new(label, r.supported_below(), "")),
            Err(heckekit::error::Error::UnsupportedValence(v)) => Ok(CheckLine::new(label, true, format!("skipped: {v}"))),
            Err(e) => Err(e),
        }
    })
}

fn re_hom<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let (ctx, win) = (&env.ctx, env.cfg.window);
    fan_out(&pairs(env)?, |(x, y)| {
        let t = re_hom_table(ctx, x, y, win)?;
        let bad: Vec<String> = t
            .iter()
            .filter(|(&(n, m), &d)| d != re_hom_expected(x, y, n, m))
            .map(|((n, m), d)| format!("<{n}>[{m}] = {d}"))
            .collect();
        Ok(CheckLine::new(format!("Hom_RE(Δ_{}, ∇_{})", name(env, x), name(env, y)), bad.is_empty(), bad.join(", ")))
    })
}

fn ringel<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let ctx = &env.ctx;
    fan_out(&elements(env)?, |x| {
        let (l, r, eq) = ringel_costandard(ctx, x)?;
        let ok = verify_equivalence(ctx, &eq, &l.complex, &r.complex, HomFlavor::RightEquivariant)?;
        Ok(CheckLine::new(format!("R(∇_{})", name(env, x)), ok, ""))
    })
}

fn hw<F: Field>(env: &Env<F>) -> Result<Vec<CheckLine>> {
    let sys = env.sys();
    let subset = match &env.cfg.subset {
        Some(lit) => LocallyClosedSubset::parse(sys, lit)?,
        None => LocallyClosedSubset::everything(sys)?,
    };
    let rep = hw_axiom_check(&env.ctx, &subset, env.cfg.window.min(3))?;
    Ok(vec![CheckLine::new(
        format!("highest weight checks on {subset}"),
        rep.passed(),
        if rep.passed() { format!("{} checks", rep.checked) } else { rep.failures.join("; ") },
    )])
}
