use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use heckekit::coxeter::{CoxeterSystem, Element, Gen};
use heckekit::field::Field;
use heckekit::hecke::{HeckeAlgebra, HeckeElement};
use heckekit::homotopy::{convolve, dualize_complex, find_equivalence, minimize, Complex};
use heckekit::locale::{local_hom_rank, LocallyClosedSubset};
use heckekit::recperv::{
    build_costandard_word, build_standard_word, elementary_costandard, elementary_standard, perverse_check,
    rex_cone, rex_independence, simple_candidate, simple_candidate_check,
};
use heckekit::requiv::{forget, re_perverse_check, ringel_costandard};
use heckekit::soergelcalc::{BSObject, Soergel};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{complex_json, complex_text, CheckLine, Report};
use crate::suites;
use crate::Cmd;

/// Shared state for one run.
pub struct Env<F: Field> {
    pub cfg: RunConfig,
    pub ctx: Soergel<F>,
    pub hecke: HeckeAlgebra,
}

impl<F: Field> Env<F> {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let real = cfg.realization.build::<F>()?;
        let ctx = Soergel::new(Arc::new(real));
        let hecke = HeckeAlgebra::new(ctx.system().clone());
        if let Some(dir) = &cfg.cache {
            hecke.load_cache(dir);
        }
        Ok(Env { cfg: cfg.clone(), ctx, hecke })
    }

    pub fn sys(&self) -> &Arc<CoxeterSystem> {
        self.ctx.system()
    }

    pub fn word(&self, text: &str) -> Result<Vec<Gen>> {
        Ok(self.sys().parse_word(text)?)
    }

    pub fn element(&self, text: &str) -> Result<Element> {
        Ok(self.sys().element(&self.word(text)?))
    }

    fn save_cache(&self) {
        if let Some(dir) = &self.cfg.cache {
            if let Err(e) = self.hecke.save_cache(dir) {
                eprintln!("warning: could not write the cache: {e}");
            }
        }
    }
}

pub fn run<F: Field>(cfg: &RunConfig, cmd: &Cmd) -> Result<Report> {
    let env = Env::<F>::new(cfg)?;
    let report = match cmd {
        Cmd::Info => info(&env)?,
        Cmd::Homrank { v, w } => homrank(&env, v, w)?,
        Cmd::Lightleaves { word, x } => lightleaves(&env, word, x)?,
        Cmd::Klpoly { x, w } => klpoly(&env, x, w)?,
        Cmd::Standard { word, check } => standard(&env, word, check, false)?,
        Cmd::Costandard { word, check } => standard(&env, word, check, true)?,
        Cmd::Convolve { factors } => convolve_cmd(&env, factors)?,
        Cmd::Perverse { factors, re } => perverse(&env, factors, *re)?,
        Cmd::Simplecheck { word } => simplecheck(&env, word)?,
        Cmd::Rexcone { a, b } => rexcone(&env, a, b)?,
        Cmd::Ringel { x } => ringel(&env, x)?,
        Cmd::Verify { suite, .. } => suites::run(&env, suite)?,
    };
    env.save_cache();
    Ok(report)
}

fn info<F: Field>(env: &Env<F>) -> Result<Report> {
    let sys = env.sys();
    let real = env.ctx.realization();
    let mut r = Report::new("info");
    let order = if sys.is_finite() { sys.enumerate(1_000_000).ok().map(|v| v.len()) } else { None };
    r.line(format!("type {} of rank {} with generators {}", sys.type_name(), sys.rank(), sys.labels().join(", ")));
    r.line(format!("realization of dimension {} over {}", real.dim(), real.report().field));
    r.line(match order {
        Some(n) => format!("|W| = {n}"),
        None => "W is infinite".into(),
    });
    for c in &real.report().checks {
        r.check(CheckLine::new(&c.name, c.passed, &c.detail));
    }
    r.result = json!({
        "type": sys.type_name(),
        "rank": sys.rank(),
        "generators": sys.labels(),
        "finite": sys.is_finite(),
        "order": order,
        "dim": real.dim(),
        "validation": real.report(),
    });
    Ok(r)
}

fn homrank<F: Field>(env: &Env<F>, v: &str, w: &str) -> Result<Report> {
    let (vw, ww) = (env.word(v)?, env.word(w)?);
    let sys = env.sys();
    let rank = match &env.cfg.subset {
        Some(lit) => {
            let i = LocallyClosedSubset::parse(sys, lit)?;
            local_hom_rank(sys, &vw, &ww, &i)
        }
        None => env.ctx.hom_graded_rank(&vw, &ww),
    };
    let mut r = Report::new("homrank");
    r.line(rank.to_string());
    r.result = json!({
        "source": sys.word_string(&vw),
        "target": sys.word_string(&ww),
        "subset": env.cfg.subset,
        "rank": rank.to_string(),
        "coefficients": rank.terms().map(|(k, c)| json!([k, c])).collect::<Vec<_>>(),
    });
    Ok(r)
}

fn lightleaves<F: Field>(env: &Env<F>, word: &str, x: &str) -> Result<Report> {
    let (w, xe) = (env.word(word)?, env.element(x)?);
    let sys = env.sys();
    let subs = sys.subexpressions(&w, &xe);
    let mut r = Report::new("lightleaves");
    let mut rows = Vec::new();
    for e in &subs {
        let desc = env.ctx.describe_leaf(&w, e);
        let leaf = env.ctx.light_leaf(&w, e)?;
        r.line(format!("{desc}  defect {}  degree {}", e.defect, leaf.degree));
        rows.push(json!({"decorations": desc, "defect": e.defect, "degree": leaf.degree}));
    }
    r.line(format!("{} light leaves {} -> {}", subs.len(), sys.expr_string(&w), sys.elem_string(&xe)));
    r.result = json!({"word": sys.word_string(&w), "element": sys.elem_string(&xe), "leaves": rows});
    Ok(r)
}

fn klpoly<F: Field>(env: &Env<F>, x: &str, w: &str) -> Result<Report> {
    let (xe, we) = (env.element(x)?, env.element(w)?);
    let coeffs = env.hecke.kl_polynomial(&xe, &we)?;
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        terms.push(match i {
            0 => c.to_string(),
            1 if c == 1 => "q".into(),
            1 => format!("{c}q"),
            _ if c == 1 => format!("q^{i}"),
            _ => format!("{c}q^{i}"),
        });
    }
    let shown = if terms.is_empty() { "0".into() } else { terms.join(" + ") };
    let mut r = Report::new("klpoly");
    r.line(format!("P_{{{},{}}} = {shown}", env.sys().elem_string(&xe), env.sys().elem_string(&we)));
    r.result = json!({"x": env.sys().elem_string(&xe), "w": env.sys().elem_string(&we), "coefficients": coeffs});
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum StdCheck {
    Char,
    Perverse,
    Dual,
    Rex,
}

fn standard<F: Field>(env: &Env<F>, word: &str, checks: &[StdCheck], costandard: bool) -> Result<Report> {
    let w = env.word(word)?;
    let sys = env.sys();
    let we = sys.element(&w);
    let red = if costandard { build_costandard_word(&env.ctx, &w)? } else { build_standard_word(&env.ctx, &w)? };
    let name = if costandard { "costandard" } else { "standard" };
    let c = &red.current;
    let mut r = Report::new(name);
    r.line(format!("{} of {}: {}", name, sys.expr_string(&w), complex_text(sys, c)));
    r.check(CheckLine::new("reduction certificate", red.verify(), format!("{} raw terms", red.original.num_terms())));
    let mut extra = serde_json::Map::new();
    for chk in checks {
        match chk {
            StdCheck::Char => {
                let ch = c.character(&env.hecke);
                let want = if costandard {
                    env.hecke.bar(&HeckeElement::basis(we.clone()))
                } else {
                    HeckeElement::basis(we.clone())
                };
                r.check(CheckLine::new("char", ch == want, ch.display(sys)));
            }
            StdCheck::Perverse => {
                let rep = perverse_check(&env.ctx, c, None, env.cfg.window)?;
                r.check(CheckLine::new("perverse", rep.is_perverse(), format!("le0 {} ge0 {}", rep.le0(), rep.ge0())));
                extra.insert("perversity".into(), rep.to_json(sys));
            }
            StdCheck::Dual => {
                let d = dualize_complex(&env.ctx, c)?;
                let other =
                    if costandard { build_standard_word(&env.ctx, &w)? } else { build_costandard_word(&env.ctx, &w)? };
                let eq = find_equivalence(&env.ctx, &d, &other.current);
                let ok = eq.as_ref().is_ok_and(|e| e.verify(&d, &other.current));
                r.check(CheckLine::new("dual", ok, "duality exchanges standard and costandard"));
            }
            StdCheck::Rex => {
                for other in sys.reduced_words(&we)? {
                    if other == w {
                        continue;
                    }
                    let res = rex_independence(&env.ctx, &w, &other, costandard);
                    let ok = res.as_ref().is_ok_and(|(a, b, e)| e.verify(a, b));
                    r.check(CheckLine::new(format!("rex {}", sys.word_string(&other)), ok, ""));
                }
            }
        }
    }
    let mut result = serde_json::Map::new();
    result.insert("word".into(), json!(sys.word_string(&w)));
    result.insert("complex".into(), complex_json(sys, &env.hecke, c, "be"));
    result.extend(extra);
    r.result = result.into();
    Ok(r)
}

/// `D:st`, `N:ts`, `B:sts` or a bare word (read as `B:`).
pub fn parse_factor<F: Field>(env: &Env<F>, text: &str) -> Result<Complex<F>> {
    let (kind, word) = match text.split_once(':') {
        Some((k, w)) => (k.trim(), w),
        None => ("B", text),
    };
    let w = env.word(word)?;
    let ctx = &env.ctx;
    Ok(match kind {
        "D" | "d" => {
            if w.len() == 1 {
                elementary_standard(ctx, w[0])
            } else {
                build_standard_word(ctx, &w)?.current
            }
        }
        "N" | "n" => {
            if w.len() == 1 {
                elementary_costandard(ctx, w[0])
            } else {
                build_costandard_word(ctx, &w)?.current
            }
        }
        "B" | "b" => Complex::single(BSObject::new(w, 0), 0),
        _ => bail!("unknown factor kind {kind:?} in {text:?}; use D, N or B"),
    })
}

fn product<F: Field>(env: &Env<F>, factors: &[String]) -> Result<Complex<F>> {
    if factors.is_empty() {
        return Err(anyhow!("at least one factor is needed"));
    }
    let mut acc = Complex::unit();
    for f in factors {
        let c = parse_factor(env, f).with_context(|| format!("factor {f:?}"))?;
        acc = minimize(env.ctx.bimod(), &convolve(env.ctx.bimod(), &acc, &c)).current;
    }
    Ok(acc)
}

fn convolve_cmd<F: Field>(env: &Env<F>, factors: &[String]) -> Result<Report> {
    let c = product(env, factors)?;
    let sys = env.sys();
    let mut r = Report::new("convolve");
    r.line(complex_text(sys, &c));
    r.line(format!("char = {}", c.character(&env.hecke).display(sys)));
    r.check(CheckLine::new("d² = 0", c.is_valid(), ""));
    r.result = json!({"factors": factors, "complex": complex_json(sys, &env.hecke, &c, "be")});
    Ok(r)
}

fn perverse<F: Field>(env: &Env<F>, factors: &[String], re: bool) -> Result<Report> {
    let c = product(env, factors)?;
    let sys = env.sys();
    let elems = match &env.cfg.subset {
        Some(lit) => Some(LocallyClosedSubset::parse(sys, lit)?.members().iter().cloned().collect::<Vec<_>>()),
        None => None,
    };
    let mut r = Report::new("perverse");
    r.line(complex_text(sys, &c));
    if re {
        let rc = forget(&env.ctx, &c)?;
        let rep = re_perverse_check(&env.ctx, &rc, elems.as_deref())?;
        r.check(CheckLine::new("perverse (RE)", rep.is_perverse(), format!("le0 {} ge0 {}", rep.le0(), rep.ge0())));
        r.result = json!({"complex": complex_json(sys, &env.hecke, &rc.complex, "re"), "perversity": rep.to_json(sys)});
    } else {
        let rep = perverse_check(&env.ctx, &c, elems.as_deref(), env.cfg.window)?;
        for e in &rep.entries {
            r.line(format!(
                "{}: i^* degrees {:?}, i^! degrees {:?}",
                sys.elem_string(&e.element),
                e.star.generator_degrees(),
                e.shriek.generator_degrees()
            ));
        }
        r.check(CheckLine::new("perverse", rep.is_perverse(), format!("le0 {} ge0 {}", rep.le0(), rep.ge0())));
        r.result = json!({"complex": complex_json(sys, &env.hecke, &c, "be"), "perversity": rep.to_json(sys)});
    }
    Ok(r)
}

fn simplecheck<F: Field>(env: &Env<F>, word: &str) -> Result<Report> {
    let w = env.word(word)?;
    let sys = env.sys();
    let we = sys.element(&w);
    let c = simple_candidate(&env.ctx, &env.hecke, &w)?;
    let ev = simple_candidate_check(&env.ctx, &c, &we, env.cfg.window)?;
    let mut r = Report::new("simplecheck");
    r.line(format!("candidate: {}", complex_text(sys, &c)));
    let ch = c.character(&env.hecke);
    r.check(CheckLine::new("char is the Kazhdan–Lusztig element", ch == env.hecke.kl_basis(&we)?, ch.display(sys)));
    r.check(CheckLine::new("top restriction is b_w", ev.top_is_unit, format!("{:?}", ev.top.star.summands())));
    r.check(CheckLine::new("lower restrictions strictly bounded", ev.lower_bounds_hold, format!("{} elements", ev.lower.len())));
    r.result = json!({
        "element": sys.elem_string(&we),
        "candidate": complex_json(sys, &env.hecke, &c, "be"),
        "top": ev.top.to_json(sys),
        "lower": ev.lower.iter().map(|e| e.to_json(sys)).collect::<Vec<_>>(),
    });
    Ok(r)
}

fn rexcone<F: Field>(env: &Env<F>, a: &str, b: &str) -> Result<Report> {
    let (aw, bw) = (env.word(a)?, env.word(b)?);
    let sys = env.sys();
    let rep = rex_cone(&env.ctx, &aw, &bw)?;
    let mut r = Report::new("rexcone");
    r.line(format!("cone: {}", complex_text(sys, &rep.cone)));
    r.line(format!("minimized: {}", complex_text(sys, &rep.minimized)));
    r.check(CheckLine::new("supported below the top element", rep.supported_below(), ""));
    r.result = json!({
        "cone": complex_json(sys, &env.hecke, &rep.cone, "be"),
        "minimized": complex_json(sys, &env.hecke, &rep.minimized, "be"),
        "top_restriction": rep.top_star.summands(),
    });
    Ok(r)
}

fn ringel<F: Field>(env: &Env<F>, x: &str) -> Result<Report> {
    let xe = env.element(x)?;
    let sys = env.sys();
    let (lhs, rhs, eq) = ringel_costandard(&env.ctx, &xe)?;
    let xw0 = sys.multiply(&xe, &sys.longest_element()?);
    let ok = heckekit::homotopy::verify_equivalence(
        &env.ctx,
        &eq,
        &lhs.complex,
        &rhs.complex,
        heckekit::homotopy::HomFlavor::RightEquivariant,
    )?;
    let mut r = Report::new("ringel");
    r.line(format!("R(∇_{}) = {}", sys.elem_string(&xe), complex_text(sys, &lhs.complex)));
    r.check(CheckLine::new(format!("equivalent to Δ_{}", sys.elem_string(&xw0)), ok, ""));
    r.result = json!({
        "x": sys.elem_string(&xe),
        "image": complex_json(sys, &env.hecke, &lhs.complex, "re"),
        "target": complex_json(sys, &env.hecke, &rhs.complex, "re"),
    });
    Ok(r)
}
