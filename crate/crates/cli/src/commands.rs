//! One handler per subcommand. Each returns the full document; nothing here
//! prints.

use multicorr::arith::derive_seed;
use multicorr::correlation::{identity_error, spectral_pair, BoundChecker};
use multicorr::cyclic::choose_modulus;
use multicorr::decomposition::{decompose, diagnostics, DecompositionParams};
use multicorr::gauge::{grothendieck_ratio, BilinearMatrix, HilbertOptions, K_TEST};
use multicorr::gowers::{gowers_report, linear_forms_average, Method};
use multicorr::multiplicative::{mult_density_estimate, FolnerSpec, MultiplicativeFunction};
use multicorr::quadform::{
    exhaustive_pr_check, monochromatic_search, pr_threshold, simultaneous_pr_search, Coloring, QuadraticForm,
    SimultaneousBounds, PR_BUDGET,
};
use multicorr::recurrence::{
    density_profile, recheck_three_term, recheck_two_term, search_three_term, search_two_term, PatternThreeTerm,
    PatternTwoTerm, ThreeTermBounds,
};
use multicorr::{Complex64, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::inputs::*;
use crate::output::{cell, Outcome, Table};

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn done(doc: Value, table: Table) -> Outcome {
    Outcome { doc, table, exhausted: false }
}

pub fn gowers(a: &GowersArgs, seed: u64) -> Result<Outcome> {
    let (label, signal) = match (&a.chi, &a.signal) {
        (Some(chi), None) => {
            let n = a.n.ok_or_else(|| bad("--chi needs --n"))?;
            let modulus = match a.modulus {
                Some(m) => m,
                None => choose_modulus(n, 1)?,
            };
            let f: MultiplicativeFunction = chi.parse()?;
            (f.label(), f.truncation(n, modulus)?)
        }
        (None, Some(spec)) => (spec.clone(), parse_named_signal(spec, seed)?),
        _ => return Err(bad("give exactly one of --chi or --signal")),
    };
    let method = match a.method.unwrap_or(NormMethod::Recursive) {
        NormMethod::Direct => Method::Direct,
        NormMethod::Recursive => Method::Recursive,
        NormMethod::Fourier => Method::Fourier,
    };
    let r = gowers_report(&signal, method)?;
    let doc = json!({
        "signal": label,
        "modulus": signal.modulus(),
        "method": r.method,
        "norm_u2": r.norm_u2,
        "norm_u3": r.norm_u3,
    });
    let mut t = Table::new(&["signal", "modulus", "method", "norm_u2", "norm_u3"]);
    t.push(vec![label, signal.modulus().to_string(), doc["method"].as_str().unwrap_or("").into(), r.norm_u2.to_string(), r.norm_u3.to_string()]);
    Ok(done(doc, t))
}

pub fn forms_average(a: &FormsArgs, seed: u64) -> Result<Outcome> {
    let ls: Vec<u64> = list(&a.l, "l")?;
    let ls: [u64; 3] = ls.try_into().map_err(|_| bad("--l needs three values"))?;
    let modulus = match a.modulus {
        Some(m) => m,
        None => choose_modulus(a.n, ls.iter().sum())?,
    };
    let specs: Vec<String> = match a.inputs.len() {
        0 => vec!["random".into(); 4],
        4 => a.inputs.clone(),
        k => return Err(bad(format!("give zero or four --input values, got {k}"))),
    };
    let signals = specs
        .iter()
        .enumerate()
        .map(|(j, s)| parse_forms_input(s, j, a.n, modulus as usize, seed))
        .collect::<Result<Vec<_>>>()?;
    let r = linear_forms_average([&signals[0], &signals[1], &signals[2], &signals[3]], ls, a.n)?;
    let bp = r.bound_parts;
    let bound = 10.0 * bp.min_u3_root + bp.tail;
    let doc = json!({
        "N": a.n,
        "l": ls,
        "modulus": modulus,
        "inputs": specs,
        "value": complex(r.value),
        "abs_value": r.value.norm(),
        "bound_parts": bp,
        "bound_with_c10": bound,
        "within_bound": r.value.norm() <= bound,
    });
    let mut t = Table::new(&["N", "modulus", "value_re", "value_im", "abs_value", "min_u3_root", "tail", "c2_candidate"]);
    t.push(vec![
        a.n.to_string(),
        modulus.to_string(),
        r.value.re.to_string(),
        r.value.im.to_string(),
        r.value.norm().to_string(),
        bp.min_u3_root.to_string(),
        bp.tail.to_string(),
        cell(bp.c2_candidate),
    ]);
    Ok(done(doc, t))
}

pub fn decompose_cmd(a: &DecomposeArgs) -> Result<Outcome> {
    let modulus = match a.modulus {
        Some(m) => m,
        None => choose_modulus(a.n, 4)?,
    };
    let d = DecompositionParams::defaults(modulus);
    let params = DecompositionParams {
        q: a.q.unwrap_or(d.q),
        k1: a.k1.unwrap_or(d.k1),
        w1: a.w1.unwrap_or(d.w1),
        k2: a.k2.unwrap_or(d.k2),
        w2: a.w2.unwrap_or(d.w2),
    };
    let s = a.s.unwrap_or(2);
    let chis = a.chi.iter().map(|c| c.parse::<MultiplicativeFunction>()).collect::<Result<Vec<_>>>()?;
    let records = chis
        .par_iter()
        .map(|chi| {
            let dec = decompose(chi, a.n, modulus, params)?;
            Ok((chi.label(), diagnostics(&dec, s)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mass = records.iter().map(|(_, d)| d.l1_er).sum::<f64>() / records.len() as f64;
    let mut t = Table::new(&["chi", "Q", "K1", "W1", "K2", "W2", "lipschitz_Q", "u2_un", "u3_un", "l1_er", "sup_st", "sup_un", "sup_er"]);
    let mut out = Vec::new();
    for (label, d) in &records {
        t.push(vec![
            label.clone(),
            params.q.to_string(),
            params.k1.to_string(),
            params.w1.to_string(),
            params.k2.to_string(),
            params.w2.to_string(),
            d.lipschitz_q.to_string(),
            d.u2_un.to_string(),
            cell(d.u3_un),
            d.l1_er.to_string(),
            d.sup_st.to_string(),
            d.sup_un.to_string(),
            d.sup_er.to_string(),
        ]);
        let mut rec = serde_json::to_value(d).map_err(|e| bad(e.to_string()))?;
        rec["chi"] = json!(label);
        rec["params"] = json!(params);
        out.push(rec);
    }
    let doc = json!({
        "N": a.n,
        "modulus": modulus,
        "s": s,
        "params": params,
        "lipschitz_bound": 2.0 / params.k1 as f64,
        "records": out,
        "empirical_l1_mass": { "label": "empirical L1 mass", "value": mass, "sample_size": records.len() },
    });
    Ok(done(doc, t))
}

pub fn prcheck(a: &PrcheckArgs) -> Result<Outcome> {
    let p: QuadraticForm = a.form.parse()?;
    let disc = p.discriminants().as_array();
    let mut doc = json!({
        "form": p.coefficients(),
        "discriminants": disc,
        "admissible": p.is_admissible(),
    });
    let mut exhausted = false;
    let mut t = Table::new(&["form", "d1", "d2", "d3", "admissible", "least_n", "mono_x", "mono_y", "mono_n"]);
    let mut least = None;
    let mut mono_cells = [None, None, None];

    if let Some(r) = a.r {
        let limit = a.n_limit.unwrap_or(30);
        let th = pr_threshold(&p, r, limit)?;
        exhausted |= th.least_n.is_none();
        least = th.least_n;
        let witness = match th.checks.iter().rev().find(|c| !c.1) {
            Some(&(n, _)) => exhaustive_pr_check(&p, r, n)?.witness.map(|c| c.cells),
            None => None,
        };
        doc["threshold"] = json!({
            "r": r,
            "n_limit": limit,
            "budget": PR_BUDGET,
            "least_n": th.least_n,
            "budget_exhausted": th.budget_exhausted,
            "checks": th.checks.iter().map(|&(n, regular)| json!({ "n": n, "regular": regular })).collect::<Vec<_>>(),
            "last_avoiding_coloring": witness,
        });
    }
    let coloring = a.coloring.as_deref().map(|path| Coloring::parse_text(&read_text(path)?)).transpose()?;
    if let Some(c) = &coloring {
        let n_max = a.n_max.unwrap_or(c.n_max());
        let w = monochromatic_search(&p, c, n_max)?;
        exhausted |= w.is_none();
        if let Some(w) = w {
            mono_cells = [Some(w.x), Some(w.y), Some(w.n)];
        }
        doc["monochromatic"] = json!({ "n_max": n_max, "witness": w });
    }
    if let Some(f2) = &a.form2 {
        let q: QuadraticForm = f2.parse()?;
        let c = coloring.as_ref().ok_or_else(|| bad("--form2 needs --coloring"))?;
        let bounds = SimultaneousBounds {
            x_max: a.x_max.unwrap_or(c.n_max()),
            n_max: a.n_max.unwrap_or(20),
            k_max: a.k_max.unwrap_or(20),
        };
        let w = simultaneous_pr_search(&p, &q, c, bounds)?;
        exhausted |= w.is_none();
        doc["simultaneous"] = json!({ "form2": q.coefficients(), "bounds": bounds, "witness": w });
    }
    t.push(vec![
        p.to_string(),
        disc[0].to_string(),
        disc[1].to_string(),
        disc[2].to_string(),
        p.is_admissible().to_string(),
        cell(least),
        cell(mono_cells[0]),
        cell(mono_cells[1]),
        cell(mono_cells[2]),
    ]);
    Ok(Outcome { doc, table: t, exhausted })
}

pub fn recurrence2(a: &Recurrence2Args) -> Result<Outcome> {
    let set = parse_set(&a.set)?;
    let pat: PatternTwoTerm = a.pattern.parse()?;
    let (m_max, n_max) = (a.m_max.unwrap_or(100), a.n_max.unwrap_or(100));
    let w = search_two_term(&set, &pat, m_max, n_max)?;
    let doc = json!({
        "set": a.set,
        "pattern": [pat.l1, pat.l2, pat.l3],
        "m_max": m_max,
        "n_max": n_max,
        "witness": w.map(|w| json!({ "m": w.m, "n": w.n, "products": w.products.map(|p| p as u64) })),
        "rechecked": w.map(|w| recheck_two_term(&set, &pat, &w)),
    });
    let mut t = Table::new(&["m", "n", "L1", "L2"]);
    if let Some(w) = w {
        t.push(vec![w.m.to_string(), w.n.to_string(), w.products[0].to_string(), w.products[1].to_string()]);
    }
    Ok(Outcome { doc, table: t, exhausted: w.is_none() })
}

pub fn recurrence3(a: &Recurrence3Args) -> Result<Outcome> {
    let set = parse_set(&a.set)?;
    let pat: PatternThreeTerm = a.pattern.parse()?;
    let bound = a.bound.unwrap_or(10);
    let w = search_three_term(&set, &pat, ThreeTermBounds::uniform(bound))?;
    let doc = json!({
        "set": a.set,
        "pattern": pat.l,
        "bound": bound,
        "witness": w.map(|w| json!({ "m": w.m, "n": w.n, "mp": w.mp, "np": w.np, "products": w.products.map(|p| p as u64) })),
        "rechecked": w.map(|w| recheck_three_term(&set, &pat, &w)),
    });
    let mut t = Table::new(&["m", "n", "mp", "np", "P1", "P2", "P3"]);
    if let Some(w) = w {
        let mut row = vec![w.m.to_string(), w.n.to_string(), w.mp.to_string(), w.np.to_string()];
        row.extend(w.products.iter().map(|p| p.to_string()));
        t.push(row);
    }
    Ok(Outcome { doc, table: t, exhausted: w.is_none() })
}

pub fn density(a: &DensityArgs) -> Result<Outcome> {
    let set = parse_set(&a.set)?;
    let primes: Vec<u64> = list(&a.primes, "prime")?;
    let top = a.max_exponent.unwrap_or(4);
    let specs = (1..=top).map(|e| FolnerSpec::new(primes.clone(), e)).collect::<Result<Vec<_>>>()?;
    let est = mult_density_estimate(&set, &specs)?;
    let mut t = Table::new(&["max_exponent", "size", "hits", "estimate"]);
    for s in &est.stages {
        t.push(vec![s.max_exponent.to_string(), s.size.to_string(), s.hits.to_string(), s.estimate.to_string()]);
    }
    let doc = json!({ "set": a.set, "primes": primes, "label": est.label, "stages": est.stages });
    Ok(done(doc, t))
}

pub fn spectral(a: &SpectralArgs, seed: u64) -> Result<Outcome> {
    let input = match &a.system {
        Some(path) => load_system(path, seed)?,
        None => random_system(seed, a.max_size.unwrap_or(8), a.max_order.unwrap_or(60)),
    };
    let [f, g, h] = &input.functions;
    let sys = &input.system;
    let pair = spectral_pair(sys, f, g, h)?;
    let m = pair.order;
    let err = identity_error(&pair, sys, f, g, h)?;
    let checker = BoundChecker::new(pair, sys, f, g, h)?;
    let pairs = a.pairs.unwrap_or(100);
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for i in 0..pairs as u64 {
        let s = derive_seed(seed, 1000 + i);
        let rep = checker.check(&disc_samples(s, 0, m), &disc_samples(s, 1, m))?;
        violations += usize::from(!rep.holds);
        if rep.rhs > 0.0 {
            worst = worst.max(rep.lhs / rep.rhs);
        }
    }
    let doc = json!({
        "M": m,
        "points": sys.size(),
        "lambda": "uniform",
        "max_identity_error": err,
        "opnorm_G": checker.opnorm(),
        "bound_pairs": pairs,
        "bound_violations": violations,
        "max_bound_ratio": worst,
    });
    let mut t = Table::new(&["M", "points", "max_identity_error", "opnorm_G", "bound_pairs", "bound_violations"]);
    t.push(vec![m.to_string(), sys.size().to_string(), err.to_string(), checker.opnorm().to_string(), pairs.to_string(), violations.to_string()]);
    Ok(done(doc, t))
}

pub fn gauge(a: &GaugeArgs, seed: u64) -> Result<Outcome> {
    let m: BilinearMatrix =
        serde_json::from_str(&read_text(&a.matrix)?).map_err(|e| bad(format!("bad matrix file: {e}")))?;
    let d = HilbertOptions::for_matrix(&m, seed);
    let opts = HilbertOptions {
        dim: a.dim.unwrap_or(d.dim),
        restarts: a.restarts.unwrap_or(d.restarts),
        iters: a.iters.unwrap_or(d.iters),
        seed,
    };
    let r = grothendieck_ratio(&m, &opts)?;
    let doc = json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "dim": opts.dim,
        "restarts": opts.restarts,
        "iters": opts.iters,
        "sign_value": r.sign_value,
        "hilbert_value": r.hilbert_value,
        "hilbert_is_lower_bound": true,
        "ratio": if r.infinite { Value::Null } else { json!(r.ratio) },
        "infinite": r.infinite,
        "k_test": K_TEST,
        "within_k_test": !r.infinite && r.ratio <= K_TEST + 1e-6,
    });
    let mut t = Table::new(&["rows", "cols", "sign_value", "hilbert_value", "ratio"]);
    t.push(vec![m.rows().to_string(), m.cols().to_string(), r.sign_value.to_string(), r.hilbert_value.to_string(), r.ratio.to_string()]);
    Ok(done(doc, t))
}

pub fn profile(a: &ProfileArgs, seed: u64) -> Result<Outcome> {
    let densities: Vec<f64> = list(&a.densities, "density")?;
    let pat: PatternTwoTerm = a.pattern.parse()?;
    let (m_max, n_max) = (a.m_max.unwrap_or(50), a.n_max.unwrap_or(50));
    let folner = match &a.folner_primes {
        Some(p) => Some(FolnerSpec::new(list(p, "prime")?, a.folner_exponent.unwrap_or(3))?),
        None => None,
    };
    let rows = density_profile(&densities, seed, a.universe, &pat, m_max, n_max, folner.as_ref())?;
    let mut t = Table::new(&["density", "found", "steps", "m", "n", "mult_density"]);
    for r in &rows {
        t.push(vec![r.density.to_string(), r.found.to_string(), r.steps.to_string(), cell(r.m), cell(r.n), cell(r.mult_density)]);
    }
    let doc = json!({
        "pattern": [pat.l1, pat.l2, pat.l3],
        "universe": a.universe,
        "m_max": m_max,
        "n_max": n_max,
        "rows": rows,
    });
    Ok(done(doc, t))
}
