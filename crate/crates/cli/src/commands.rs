use nil_core::ideal::{adj0_power_gap, adj0_power_membership, multiplier_ideal_toric, MonomialIdeal};
use nil_core::newton::{ExponentVector, Scale};
use nil_core::oracle::{self, ConvergenceVerdict, OracleConfig, Verdict, Weight};
use nil_core::toric::ConcaveToricFunction;
use nil_core::Rational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::spec::{IdealText, ProblemSpec};
use crate::syntax::{self, ParseError};
use crate::{Failure, Outcome, Settings};

type Res<T> = Result<T, Failure>;

fn parsed<T>(field: &'static str, r: Result<T, ParseError>) -> Res<T> {
    r.map_err(|error| Failure::Parse { field, error })
}

fn require<'a, T>(v: &'a Option<T>, name: &str) -> Res<&'a T> {
    v.as_ref().ok_or_else(|| Failure::Input(format!("missing {name}")))
}

fn rational(src: &str, field: &'static str) -> Res<Rational> {
    parsed(field, syntax::parse_rational(src))
}

fn rat_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn vector_json(v: &ExponentVector) -> Value {
    Value::Array(v.coords().iter().map(rat_json).collect())
}

fn vector_text(v: &ExponentVector) -> String {
    v.to_string()
}

fn ideal_json(i: &MonomialIdeal, vars: &[String]) -> Value {
    json!(syntax::format_generators(i, vars))
}

/// Variable names: explicit, else inferred from the given sources.
fn variables(spec: &ProblemSpec, sources: &[&str]) -> Res<Vec<String>> {
    let vars = if spec.variables.is_empty() {
        parsed("variables", syntax::infer_variables(sources))?
    } else {
        spec.variables.clone()
    };
    if vars.is_empty() {
        return Err(Failure::Input("cannot infer the variables; pass --vars".into()));
    }
    for (i, v) in vars.iter().enumerate() {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && v != "min"
            && v != "power";
        if !ok {
            return Err(Failure::Input(format!("invalid variable name '{v}'")));
        }
        if vars[..i].contains(v) {
            return Err(Failure::Input(format!("duplicate variable '{v}'")));
        }
    }
    Ok(vars)
}

fn axis_index(spec: &ProblemSpec, vars: &[String]) -> Res<usize> {
    let name = require(&spec.axis, "--axis")?;
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| Failure::Input(format!("axis '{name}' is not one of the variables {}", vars.join(", "))))
}

fn ideal_source(spec: &ProblemSpec) -> Option<String> {
    spec.ideal.as_ref().map(IdealText::source)
}

/// Parses `--ideal` (required) and the variables.
fn ideal_and_vars(spec: &mut ProblemSpec) -> Res<(MonomialIdeal, Vec<String>)> {
    let src = ideal_source(spec).ok_or_else(|| Failure::Input("missing --ideal".into()))?;
    let vars = variables(spec, &[&src])?;
    spec.variables = vars.clone();
    let ideal = parsed("--ideal", syntax::parse_ideal(&src, &vars))?;
    Ok((ideal, vars))
}

/// A toric weight from either `--function` or `--ideal` at scale `--c`.
/// Returns the weight, the ideal when given, and the scale.
fn weight(spec: &mut ProblemSpec, default_c: bool) -> Res<(ConcaveToricFunction, Option<MonomialIdeal>, Vec<String>)> {
    match (&spec.toric_function, &spec.ideal) {
        (Some(_), Some(_)) => Err(Failure::Input("give either --ideal or --function, not both".into())),
        (None, None) => Err(Failure::Input("missing --ideal or --function".into())),
        (Some(f), None) => {
            if spec.c.is_some() {
                return Err(Failure::Input("--c applies to --ideal only".into()));
            }
            let f = f.clone();
            let vars = if spec.variables.is_empty() {
                let inferred = parsed("--function", syntax::infer_variables(&[&f]))?;
                if inferred.is_empty() {
                    syntax::default_variables(power_arity(&f))
                } else {
                    inferred
                }
            } else {
                variables(spec, &[])?
            };
            spec.variables = vars.clone();
            let g = parsed("--function", syntax::parse_function(&f, &vars))?;
            Ok((g, None, vars))
        }
        (None, Some(_)) => {
            let (ideal, vars) = ideal_and_vars(spec)?;
            let c = match &spec.c {
                Some(c) => rational(c, "--c")?,
                None if default_c => Rational::one(),
                None => return Err(Failure::Input("missing --c".into())),
            };
            if ideal.is_zero() {
                return Err(Failure::Input("the zero ideal has no toric weight".into()));
            }
            let g = ideal.toric_function(&c)?;
            Ok((g, Some(ideal), vars))
        }
    }
}

/// Number of exponents in `power(k; a1, ..., an)`, for naming variables.
fn power_arity(src: &str) -> usize {
    src.split_once(';').map_or(0, |(_, rest)| rest.split(',').count())
}

/// `β` from `--beta` or `--monomial`.
fn beta(spec: &ProblemSpec, vars: &[String]) -> Res<Vec<u32>> {
    let b = match (&spec.options.beta, &spec.options.monomial) {
        (Some(_), Some(_)) => return Err(Failure::Input("give either --beta or --monomial, not both".into())),
        (None, None) => return Err(Failure::Input("missing --beta or --monomial".into())),
        (Some(b), None) => parsed("--beta", syntax::parse_natural_list(b))?,
        (None, Some(m)) => parsed("--monomial", syntax::parse_monomial(m, vars))?,
    };
    if b.len() != vars.len() {
        return Err(Failure::Input(format!("--beta has {} entries for {} variables", b.len(), vars.len())));
    }
    Ok(b)
}

fn scale_json(s: &Scale) -> Value {
    json!(s.to_string())
}

fn simple(result: Value, certificates: Value, text: Vec<(&str, String)>) -> Outcome {
    Outcome {
        result,
        certificates,
        text: text.into_iter().map(|(l, v)| (l.to_string(), v)).collect(),
        inconclusive: false,
    }
}

/// Margins `β+𝟙` clears the scaled polyhedron by, for each generator.
fn generator_margins(ideal: &MonomialIdeal, c: &Rational, result: &MonomialIdeal, vars: &[String]) -> Res<Value> {
    let p = ideal.newton_polyhedron()?;
    let mut out = Vec::new();
    let mut gens = result.generators().to_vec();
    gens.sort_by(|a, b| b.cmp(a));
    for g in gens {
        let x = ExponentVector::from_naturals(&g).plus(&ExponentVector::ones(g.len()));
        out.push(json!({
            "monomial": syntax::format_monomial(&g, vars),
            "margin": rat_json(&p.signed_margin(&x, c)?),
        }));
    }
    Ok(Value::Array(out))
}

pub(crate) fn execute(command: &str, mut spec: ProblemSpec, settings: &Settings) -> Res<(ProblemSpec, Outcome)> {
    const SOURCE: &[&str] = &["ideal", "toric_function", "c"];
    let allowed: Vec<&str> = match command {
        "mult" => SOURCE.to_vec(),
        "adj" | "check-adjunction" => vec!["ideal", "c", "axis"],
        "adj0" => vec!["k", "alpha", "beta", "monomial", "axis"],
        "lct" => vec!["ideal"],
        "jump" => vec!["ideal", "c_max"],
        "openness" => vec!["ideal", "c"],
        "valuation" => [SOURCE, &["beta", "monomial"]].concat(),
        "oracle" => [
            SOURCE,
            &["mode", "shift", "beta", "monomial", "epsilon", "axis", "weight", "schedule", "points", "samples"],
        ]
        .concat(),
        other => return Err(Failure::Input(format!("unknown command '{other}'"))),
    };
    spec.check_fields(command, &allowed).map_err(Failure::Input)?;
    let outcome = match command {
        "mult" => mult(&mut spec)?,
        "adj" => adj(&mut spec)?,
        "adj0" => adj0(&mut spec)?,
        "lct" => lct(&mut spec)?,
        "jump" => jump(&mut spec)?,
        "openness" => openness(&mut spec)?,
        "valuation" => valuation(&mut spec)?,
        "check-adjunction" => check_adjunction(&mut spec)?,
        _ => run_oracle(&mut spec, settings)?,
    };
    spec.command = Some(command.to_string());
    Ok((spec, outcome))
}

fn mult(spec: &mut ProblemSpec) -> Res<Outcome> {
    if spec.toric_function.is_some() {
        let (g, _, vars) = weight(spec, false)?;
        let j = multiplier_ideal_toric(&g)?;
        return Ok(simple(
            json!({ "generators": ideal_json(&j, &vars) }),
            json!({}),
            vec![("generators", syntax::format_ideal(&j, &vars))],
        ));
    }
    let (ideal, vars) = ideal_and_vars(spec)?;
    let c = rational(require(&spec.c, "--c")?, "--c")?;
    let j = ideal.multiplier_ideal(&c)?;
    let margins = if ideal.is_zero() {
        json!([])
    } else {
        generator_margins(&ideal, &c, &j, &vars)?
    };
    Ok(simple(
        json!({ "generators": ideal_json(&j, &vars) }),
        json!({ "caps": ideal.multiplier_caps(&c)?, "margins": margins }),
        vec![("generators", syntax::format_ideal(&j, &vars))],
    ))
}

fn adj(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (ideal, vars) = ideal_and_vars(spec)?;
    let c = rational(require(&spec.c, "--c")?, "--c")?;
    let axis = axis_index(spec, &vars)?;
    let a = ideal.adjoint_ideal(&c, axis)?;
    Ok(simple(
        json!({ "generators": ideal_json(&a, &vars) }),
        json!({ "caps": ideal.adjoint_caps(&c, axis)? }),
        vec![("generators", syntax::format_ideal(&a, &vars))],
    ))
}

fn adj0(spec: &mut ProblemSpec) -> Res<Outcome> {
    let k = rational(require(&spec.options.k, "--k")?, "--k")?;
    let alpha = parsed("--alpha", syntax::parse_rational_list(require(&spec.options.alpha, "--alpha")?))?;
    let vars = if spec.variables.is_empty() {
        syntax::default_variables(alpha.len())
    } else {
        variables(spec, &[])?
    };
    if vars.len() != alpha.len() {
        return Err(Failure::Input(format!("--alpha has {} entries for {} variables", alpha.len(), vars.len())));
    }
    spec.variables = vars.clone();
    let axis = axis_index(spec, &vars)?;
    let b = beta(spec, &vars)?;
    let alpha = ExponentVector::new(alpha)?;
    let member = adj0_power_membership(&k, &alpha, axis, &b)?;
    let gap = adj0_power_gap(&k, &alpha, axis, &b);
    let case = if gap > Rational::zero() {
        "strict"
    } else if gap.is_zero() {
        "equality"
    } else {
        "below"
    };
    Ok(simple(
        json!({ "member": member, "monomial": syntax::format_monomial(&b, &vars) }),
        json!({ "gap": rat_json(&gap), "case": case }),
        vec![("member", member.to_string()), ("gap", gap.to_string()), ("case", case.to_string())],
    ))
}

fn lct(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (ideal, _) = ideal_and_vars(spec)?;
    if ideal.is_zero() {
        return Err(Failure::Input("the zero ideal has no log canonical threshold".into()));
    }
    let l = ideal.lct()?;
    let witness = match &l {
        Scale::Finite(c) => {
            let cls = ideal.newton_polyhedron()?.classify(&ExponentVector::ones(ideal.dimension()), c)?;
            cls.witness().map(vector_json).unwrap_or(Value::Null)
        }
        Scale::Infinite => Value::Null,
    };
    Ok(simple(
        json!({ "lct": scale_json(&l) }),
        json!({ "witness": witness }),
        vec![("", l.to_string())],
    ))
}

fn jump(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (ideal, _) = ideal_and_vars(spec)?;
    let c_max = rational(require(&spec.options.c_max, "--c-max")?, "--c-max")?;
    let jumps = ideal.jumping_numbers(&c_max)?;
    let text = jumps.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ");
    Ok(simple(
        json!({ "jumping_numbers": jumps.iter().map(rat_json).collect::<Vec<_>>() }),
        json!({}),
        vec![("jumping numbers", if text.is_empty() { "none".into() } else { text })],
    ))
}

fn openness(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (ideal, vars) = ideal_and_vars(spec)?;
    let c = rational(require(&spec.c, "--c")?, "--c")?;
    let eps = ideal.openness_margin(&c)?;
    let perturbed = (Rational::one() + &eps) * &c;
    let j = ideal.multiplier_ideal(&c)?;
    Ok(simple(
        json!({ "margin": rat_json(&eps), "perturbed_c": rat_json(&perturbed) }),
        json!({ "multiplier": ideal_json(&j, &vars) }),
        vec![("margin", eps.to_string()), ("perturbed c", perturbed.to_string())],
    ))
}

fn valuation(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (g, _, vars) = weight(spec, true)?;
    let b = beta(spec, &vars)?;
    let report = g.valuative_membership(&b)?;
    let mut text = vec![("member", report.member.to_string())];
    if let Some(m) = &report.margin {
        text.push(("margin", m.to_string()));
    }
    if let Some(w) = &report.certificate {
        text.push(("witness", vector_text(w)));
    }
    Ok(simple(
        json!({ "member": report.member, "monomial": syntax::format_monomial(&b, &vars) }),
        json!({
            "margin": report.margin.as_ref().map(rat_json),
            "witness": report.certificate.as_ref().map(vector_json),
        }),
        text,
    ))
}

fn check_adjunction(spec: &mut ProblemSpec) -> Res<Outcome> {
    let (ideal, vars) = ideal_and_vars(spec)?;
    let c = rational(require(&spec.c, "--c")?, "--c")?;
    let axis = axis_index(spec, &vars)?;
    let r = ideal.adjunction_report(&c, axis)?;
    let rest: Vec<String> = vars.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, v)| v.clone()).collect();
    let result = json!({
        "adj": ideal_json(&r.adjoint, &vars),
        "multiplier": ideal_json(&r.multiplier, &vars),
        "kernel": ideal_json(&r.kernel, &vars),
        "shifted_multiplier": ideal_json(&r.shifted_multiplier, &vars),
        "restriction": ideal_json(&r.restriction, &rest),
        "restricted_multiplier": ideal_json(&r.restricted_multiplier, &rest),
        "kernel_exact": r.kernel_exact,
        "restriction_exact": r.restriction_exact,
    });
    let text = vec![
        ("adj", syntax::format_ideal(&r.adjoint, &vars)),
        ("multiplier", syntax::format_ideal(&r.multiplier, &vars)),
        ("kernel", syntax::format_ideal(&r.kernel, &vars)),
        ("shifted multiplier", syntax::format_ideal(&r.shifted_multiplier, &vars)),
        ("restriction", syntax::format_ideal(&r.restriction, &rest)),
        ("restricted multiplier", syntax::format_ideal(&r.restricted_multiplier, &rest)),
        ("kernel exact", r.kernel_exact.to_string()),
        ("restriction exact", r.restriction_exact.to_string()),
    ];
    Ok(simple(result, json!({ "caps": ideal.adjoint_caps(&c, axis)? }), text))
}

/// Box sizes as decimals (`2.5`) or rationals (`5/2`).
fn f64_list(src: &str, field: &'static str) -> Res<Vec<f64>> {
    if let Ok(v) = src.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>() {
        return Ok(v);
    }
    Ok(parsed(field, syntax::parse_rational_list(src))?
        .iter()
        .map(|r| r.to_f64().unwrap_or(f64::NAN))
        .collect())
}

fn verdict_outcome(v: &ConvergenceVerdict, mut certificates: Value) -> Outcome {
    let finite = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
    let result = json!({
        "verdict": v.verdict.to_string(),
        "partial_values": v.partial_values.iter().map(|(t, e)| json!([t, finite(*e)])).collect::<Vec<_>>(),
        "log_partial_values": v.log_partial_values.iter().map(|(t, e)| json!([t, finite(*e)])).collect::<Vec<_>>(),
    });
    certificates["ratios"] = v.evidence.ratios.iter().map(|r| finite(*r)).collect();
    let mut text = vec![("verdict".to_string(), v.verdict.to_string())];
    for (t, l) in &v.log_partial_values {
        text.push((format!("log I(T={t})"), format!("{l:.6}")));
    }
    let ratios: Vec<String> = v.evidence.ratios.iter().map(|r| format!("{r:.4e}")).collect();
    text.push(("increment ratios".into(), ratios.join(", ")));
    Outcome {
        result,
        certificates,
        text,
        inconclusive: v.verdict == Verdict::Inconclusive,
    }
}

fn run_oracle(spec: &mut ProblemSpec, settings: &Settings) -> Res<Outcome> {
    let mode = require(&spec.options.mode, "--mode")?.clone();
    let (g, _, vars) = weight(spec, false)?;
    let n = vars.len();
    let weight_kind = spec.options.weight.clone().unwrap_or_else(|| "plain".into());
    let poincare = match weight_kind.as_str() {
        "plain" => false,
        "poincare" => true,
        other => return Err(Failure::Input(format!("unknown --weight '{other}' (plain or poincare)"))),
    };
    let weighted = mode == "adjoint" || (mode == "polydisk" && poincare);
    let mut cfg = if weighted { OracleConfig::poincare() } else { OracleConfig::default() };
    if let Some(s) = &spec.options.schedule {
        cfg.truncation_schedule = f64_list(s, "--schedule")?;
    }
    if let Some(p) = spec.options.points {
        cfg.quadrature_points_per_axis = p;
    }
    if let Some(s) = spec.options.samples {
        cfg.mc_samples = s;
    }
    if let Some(seed) = settings.seed {
        cfg.seed = seed;
    }
    let axis = if spec.axis.is_some() { Some(axis_index(spec, &vars)?) } else { None };
    let need_axis = || axis.ok_or_else(|| Failure::Input("missing --axis".into()));
    // A from --shift, else from β: β+𝟙, or β+𝟙̃ along the hyperplane.
    let shift = |spec: &ProblemSpec, axis: Option<usize>| -> Res<ExponentVector> {
        match &spec.options.shift {
            Some(s) => {
                if spec.options.beta.is_some() || spec.options.monomial.is_some() {
                    return Err(Failure::Input("give either --shift or --beta, not both".into()));
                }
                let a = parsed("--shift", syntax::parse_rational_list(s))?;
                if a.len() != n {
                    return Err(Failure::Input(format!("--shift has {} entries for {n} variables", a.len())));
                }
                Ok(ExponentVector::new(a)?)
            }
            None => {
                let b = ExponentVector::from_naturals(&beta(spec, &vars)?);
                Ok(b.plus(&match axis {
                    Some(p) => ExponentVector::ones_except(n, p),
                    None => ExponentVector::ones(n),
                }))
            }
        }
    };
    let (verdict, certificates) = match mode.as_str() {
        "orthant" => {
            let a = shift(spec, None)?;
            let v = oracle::orthant_exp_integral(&g, &a, &cfg)?;
            let exact = g.exp_integrable_shifted(&a)?;
            (v, json!({ "shift": vector_json(&a), "exact_integrable": exact }))
        }
        "adjoint" => {
            let p = need_axis()?;
            let a = shift(spec, Some(p))?;
            let eps = match &spec.options.epsilon {
                Some(e) => rational(e, "--epsilon")?,
                None => Rational::zero(),
            };
            let v = oracle::adjoint_weighted_integral(&g, &a, &eps, p, &cfg)?;
            (v, json!({ "shift": vector_json(&a), "epsilon": rat_json(&eps) }))
        }
        "polydisk" => {
            let b = beta(spec, &vars)?;
            let w = if poincare { Weight::Poincare(need_axis()?) } else { Weight::Plain };
            let v = oracle::polydisk_mc(&g, &b, w, &cfg)?;
            (v, json!({ "seed": cfg.seed, "samples": cfg.mc_samples }))
        }
        "radial" => {
            let b = beta(spec, &vars)?;
            if n != 1 {
                return Err(Failure::Input("radial mode needs a single variable".into()));
            }
            let v = oracle::radial_integral(&g, b[0], &cfg)?;
            (v, json!({}))
        }
        other => {
            return Err(Failure::Input(format!(
                "unknown --mode '{other}' (orthant, adjoint, polydisk or radial)"
            )))
        }
    };
    Ok(verdict_outcome(&verdict, certificates))
}

