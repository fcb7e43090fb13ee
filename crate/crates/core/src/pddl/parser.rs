use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Rational64;

use super::model::*;
use super::sexpr::{parse_one, Sexpr};
use crate::error::{Error, Result};

const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":equality",
    ":action-costs",
    ":numeric-fluents",
    ":fluents",
    ":adl",
];

fn unsupported(construct: impl Into<String>, at: &Sexpr) -> Error {
    let p = at.pos();
    Error::Unsupported { construct: construct.into(), line: p.line, col: p.col }
}

fn syntax(at: &Sexpr, msg: impl Into<String>) -> Error {
    Error::Syntax(at.error(msg))
}

fn list<'a>(e: &'a Sexpr, what: &str) -> Result<&'a [Sexpr]> {
    e.as_list().ok_or_else(|| syntax(e, format!("expected {what}, found `{e}`")))
}

fn atom<'a>(e: &'a Sexpr, what: &str) -> Result<&'a str> {
    e.as_atom().ok_or_else(|| syntax(e, format!("expected {what}, found `{e}`")))
}

/// Parses `a b - t c - u d` style typed lists. Untyped names get `object`.
fn typed_list(items: &[Sexpr], require_vars: bool) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        let name = atom(item, "a name")?;
        if name == "-" {
            let ty_expr = items.get(i + 1).ok_or_else(|| syntax(item, "missing type after `-`"))?;
            if ty_expr.head() == Some("either") {
                return Err(unsupported("either", ty_expr));
            }
            let ty = atom(ty_expr, "a type name")?;
            if pending.is_empty() {
                return Err(syntax(item, "type annotation without names"));
            }
            out.extend(pending.drain(..).map(|name| TypedName { name, ty: ty.to_string() }));
            i += 2;
            continue;
        }
        if require_vars && !name.starts_with('?') {
            return Err(syntax(item, format!("expected a variable, found `{name}`")));
        }
        pending.push(name.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|name| TypedName { name, ty: ROOT_TYPE.to_string() }));
    Ok(out)
}

struct DomainCtx<'a> {
    predicates: &'a HashMap<String, usize>,
    constants: &'a BTreeSet<String>,
}

impl DomainCtx<'_> {
    fn term(&self, e: &Sexpr, scope: &[String]) -> Result<Term> {
        let s = atom(e, "a term")?;
        if s.starts_with('?') {
            if !scope.iter().any(|v| v == s) {
                return Err(syntax(e, format!("unbound variable `{s}`")));
            }
            Ok(Term::Var(s.to_string()))
        } else {
            if !self.constants.contains(s) {
                return Err(syntax(e, format!("unknown constant `{s}`")));
            }
            Ok(Term::Const(s.to_string()))
        }
    }

    fn lifted_atom(&self, e: &Sexpr, items: &[Sexpr], scope: &[String]) -> Result<LiftedAtom> {
        let pred = atom(&items[0], "a predicate")?;
        let arity = *self.predicates.get(pred).ok_or_else(|| syntax(e, format!("undeclared predicate `{pred}`")))?;
        if items.len() - 1 != arity {
            return Err(syntax(e, format!("predicate `{pred}` expects {arity} arguments")));
        }
        let args = items[1..].iter().map(|a| self.term(a, scope)).collect::<Result<_>>()?;
        Ok(LiftedAtom { predicate: pred.to_string(), args })
    }

    fn condition(&self, e: &Sexpr, scope: &mut Vec<String>) -> Result<LiftedCondition> {
        let items = list(e, "a condition")?;
        let Some(head) = items.first() else {
            return Ok(LiftedCondition::And(Vec::new()));
        };
        let head = atom(head, "a condition keyword or predicate")?;
        match head {
            "and" | "or" => {
                let parts = items[1..].iter().map(|c| self.condition(c, scope)).collect::<Result<Vec<_>>>()?;
                Ok(if head == "and" { LiftedCondition::And(parts) } else { LiftedCondition::Or(parts) })
            }
            "not" => {
                if items.len() != 2 {
                    return Err(syntax(e, "`not` takes exactly one argument"));
                }
                Ok(LiftedCondition::Not(Box::new(self.condition(&items[1], scope)?)))
            }
            "exists" | "forall" => {
                if items.len() != 3 {
                    return Err(syntax(e, format!("`{head}` takes a parameter list and a body")));
                }
                let params = typed_list(list(&items[1], "a parameter list")?, true)?;
                let depth = scope.len();
                scope.extend(params.iter().map(|p| p.name.clone()));
                let body = self.condition(&items[2], scope);
                scope.truncate(depth);
                let body = Box::new(body?);
                Ok(if head == "exists" {
                    LiftedCondition::Exists(params, body)
                } else {
                    LiftedCondition::Forall(params, body)
                })
            }
            "imply" => Err(unsupported("imply", e)),
            "=" if items.len() == 3 && items[1].as_atom().is_some() && items[2].as_atom().is_some() => {
                Ok(LiftedCondition::Equal(self.term(&items[1], scope)?, self.term(&items[2], scope)?))
            }
            "=" | "<" | ">" | "<=" | ">=" => Ok(LiftedCondition::Numeric),
            _ => Ok(LiftedCondition::Atom(self.lifted_atom(e, items, scope)?)),
        }
    }

    fn effect(&self, e: &Sexpr, scope: &[String], out: &mut LiftedEffect) -> Result<()> {
        let items = list(e, "an effect")?;
        let Some(head) = items.first() else { return Ok(()) };
        match atom(head, "an effect keyword or predicate")? {
            "and" => {
                for part in &items[1..] {
                    self.effect(part, scope, out)?;
                }
            }
            "not" => {
                if items.len() != 2 {
                    return Err(syntax(e, "`not` takes exactly one argument"));
                }
                let inner = list(&items[1], "an atom")?;
                if inner.is_empty() {
                    return Err(syntax(&items[1], "empty atom"));
                }
                out.del.push(self.lifted_atom(&items[1], inner, scope)?);
            }
            "when" => return Err(unsupported("when (conditional effect)", e)),
            "forall" => return Err(unsupported("forall (universal effect)", e)),
            "increase" if items.len() == 3 && items[1].head() == Some("total-cost") => {
                match items[2].as_atom().and_then(parse_number) {
                    Some(k) => *out.cost.get_or_insert(Rational64::from_integer(0)) += k,
                    None => log::warn!("{}: non-constant action cost ignored", e.pos()),
                }
            }
            "increase" | "decrease" | "assign" | "scale-up" | "scale-down" => {}
            _ => out.add.push(self.lifted_atom(e, items, scope)?),
        }
        Ok(())
    }
}

/// Parses decimal numbers such as `3`, `0.25` exactly.
pub(crate) fn parse_number(s: &str) -> Option<Rational64> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let negative = int_part.starts_with('-');
    let digits = int_part.trim_start_matches(['-', '+']);
    if !digits.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let scale = 10i64.checked_pow(frac_part.len() as u32)?;
    let whole: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let numer = whole.checked_mul(scale)?.checked_add(frac)?;
    let r = Rational64::new(numer, scale);
    Some(if negative { -r } else { r })
}

fn expect_define<'a>(root: &'a Sexpr, kind: &str) -> Result<(&'a str, &'a [Sexpr])> {
    let items = list(root, "`(define ...)`")?;
    if items.first().and_then(Sexpr::as_atom) != Some("define") || items.len() < 2 {
        return Err(syntax(root, "expected `(define ...)`"));
    }
    let header = list(&items[1], &format!("`({kind} <name>)`"))?;
    if header.len() != 2 || header[0].as_atom() != Some(kind) {
        return Err(syntax(&items[1], format!("expected `({kind} <name>)`")));
    }
    Ok((atom(&header[1], "a name")?, &items[2..]))
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let root = parse_one(text)?;
    let (name, sections) = expect_define(&root, "domain")?;
    let mut domain = Domain {
        name: name.to_string(),
        requirements: Vec::new(),
        types: BTreeMap::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    let mut action_exprs = Vec::new();
    for section in sections {
        let items = list(section, "a domain section")?;
        let key = items.first().map(|k| atom(k, "a section keyword")).transpose()?.unwrap_or("");
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let r_name = atom(r, "a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r_name) {
                        return Err(unsupported(r_name, r));
                    }
                    domain.requirements.push(r_name.to_string());
                }
            }
            ":types" => {
                for t in typed_list(&items[1..], false)? {
                    domain.types.insert(t.name, t.ty);
                }
            }
            ":constants" => domain.constants.extend(typed_list(&items[1..], false)?),
            ":predicates" => {
                for p in &items[1..] {
                    let decl = list(p, "a predicate declaration")?;
                    let pname = decl.first().ok_or_else(|| syntax(p, "empty predicate declaration"))?;
                    domain.predicates.push(PredicateDecl {
                        name: atom(pname, "a predicate name")?.to_string(),
                        params: typed_list(&decl[1..], true)?,
                    });
                }
            }
            ":functions" => {}
            ":action" => action_exprs.push(section),
            ":derived" | ":durative-action" | ":constraints" => return Err(unsupported(key, section)),
            _ => return Err(syntax(section, format!("unknown domain section `{key}`"))),
        }
    }

    let predicates: HashMap<String, usize> =
        domain.predicates.iter().map(|p| (p.name.clone(), p.params.len())).collect();
    let constants: BTreeSet<String> = domain.constants.iter().map(|c| c.name.clone()).collect();
    let ctx = DomainCtx { predicates: &predicates, constants: &constants };
    for expr in action_exprs {
        domain.actions.push(parse_action(&ctx, expr)?);
    }
    Ok(domain)
}

fn parse_action(ctx: &DomainCtx<'_>, expr: &Sexpr) -> Result<ActionSchema> {
    let items = expr.as_list().unwrap();
    let name = items.get(1).ok_or_else(|| syntax(expr, "action without a name"))?;
    let name = atom(name, "an action name")?.to_string();
    let mut params = Vec::new();
    let mut precondition = LiftedCondition::And(Vec::new());
    let mut effect = None;
    let mut i = 2;
    while i < items.len() {
        let key = atom(&items[i], "an action keyword")?;
        let value = items.get(i + 1).ok_or_else(|| syntax(&items[i], format!("missing value for `{key}`")))?;
        match key {
            ":parameters" => params = typed_list(list(value, "a parameter list")?, true)?,
            ":precondition" => {
                let mut scope: Vec<String> = params.iter().map(|p: &TypedName| p.name.clone()).collect();
                precondition = ctx.condition(value, &mut scope)?;
            }
            ":effect" => {
                let scope: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
                let mut eff = LiftedEffect::default();
                ctx.effect(value, &scope, &mut eff)?;
                effect = Some(eff);
            }
            _ => return Err(syntax(&items[i], format!("unknown action keyword `{key}`"))),
        }
        i += 2;
    }
    let effect = effect.ok_or_else(|| syntax(expr, format!("action `{name}` has no :effect block")))?;
    Ok(ActionSchema { name, params, precondition, effect, pos: expr.pos() })
}

fn ground_atom_list(e: &Sexpr, objects: &BTreeSet<String>, what: &str) -> Result<Vec<(String, Vec<String>)>> {
    let items = list(e, what)?;
    let Some(head) = items.first() else { return Ok(Vec::new()) };
    match atom(head, "a predicate or `and`")? {
        "and" => {
            let mut out = Vec::new();
            for part in &items[1..] {
                out.extend(ground_atom_list(part, objects, what)?);
            }
            Ok(out)
        }
        "not" => Err(unsupported(format!("negative literal in {what}"), e)),
        "or" | "exists" | "forall" | "imply" => Err(unsupported(format!("non-conjunctive {what}"), e)),
        pred => {
            let mut args = Vec::new();
            for a in &items[1..] {
                let name = atom(a, "an object")?;
                if !objects.contains(name) {
                    return Err(syntax(a, format!("unknown object `{name}`")));
                }
                args.push(name.to_string());
            }
            Ok(vec![(pred.to_string(), args)])
        }
    }
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem> {
    let root = parse_one(text)?;
    let (name, sections) = expect_define(&root, "problem")?;
    let mut problem = Problem {
        name: name.to_string(),
        domain_name: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
        hypotheses: Vec::new(),
    };
    let mut objects: BTreeSet<String> = domain.constants.iter().map(|c| c.name.clone()).collect();
    let predicates: HashMap<&str, usize> =
        domain.predicates.iter().map(|p| (p.name.as_str(), p.params.len())).collect();
    let check_arity = |atoms: &[(String, Vec<String>)], at: &Sexpr| -> Result<()> {
        for (p, args) in atoms {
            match predicates.get(p.as_str()) {
                None => return Err(syntax(at, format!("undeclared predicate `{p}`"))),
                Some(&n) if n != args.len() => {
                    return Err(syntax(at, format!("predicate `{p}` expects {n} arguments")))
                }
                _ => {}
            }
        }
        Ok(())
    };

    for section in sections {
        let items = list(section, "a problem section")?;
        let key = items.first().map(|k| atom(k, "a section keyword")).transpose()?.unwrap_or("");
        match key {
            ":domain" => {
                problem.domain_name =
                    items.get(1).map(|d| atom(d, "a domain name")).transpose()?.unwrap_or("").to_string();
                if problem.domain_name != domain.name {
                    log::warn!("problem refers to domain `{}` but `{}` was given", problem.domain_name, domain.name);
                }
            }
            ":requirements" => {}
            ":objects" => {
                let objs = typed_list(&items[1..], false)?;
                objects.extend(objs.iter().map(|o| o.name.clone()));
                problem.objects.extend(objs);
            }
            ":init" => {
                for fact in &items[1..] {
                    match fact.head() {
                        Some("=") => {}
                        Some("not") => return Err(unsupported("negative literal in :init", fact)),
                        _ => {
                            let atoms = ground_atom_list(fact, &objects, ":init")?;
                            check_arity(&atoms, fact)?;
                            problem.init.extend(atoms);
                        }
                    }
                }
            }
            ":goal" => {
                let goal = items.get(1).ok_or_else(|| syntax(section, "empty :goal"))?;
                let atoms = ground_atom_list(goal, &objects, ":goal")?;
                check_arity(&atoms, goal)?;
                problem.goal = atoms;
            }
            ":goal-hypotheses" => {
                for hyp in &items[1..] {
                    let parts = list(hyp, "`(<name> <goal>)`")?;
                    if parts.len() != 2 {
                        return Err(syntax(hyp, "expected `(<name> <goal>)`"));
                    }
                    let hname = atom(&parts[0], "a hypothesis name")?.to_string();
                    if problem.hypotheses.iter().any(|h| h.name == hname) {
                        return Err(syntax(hyp, format!("duplicate hypothesis `{hname}`")));
                    }
                    let atoms = ground_atom_list(&parts[1], &objects, "goal hypothesis")?;
                    check_arity(&atoms, &parts[1])?;
                    problem.hypotheses.push(NamedGoal { name: hname, atoms });
                }
            }
            ":metric" => {}
            ":constraints" => return Err(unsupported(key, section)),
            _ => return Err(syntax(section, format!("unknown problem section `{key}`"))),
        }
    }
    Ok(problem)
}

/// Parses a domain and a problem text into a lifted model.
pub fn parse_domain_and_problem(domain_text: &str, problem_text: &str) -> Result<LiftedModel> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem(problem_text, &domain)?;
    Ok(LiftedModel { domain, problem })
}
