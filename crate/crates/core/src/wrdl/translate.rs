use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::monoid::{TimedPvMonoid, Weight};
use crate::rdl::{in_rdl_past, rdl_classify, RdlFormula};
use crate::transform::{Language, LanguageClass, NivatTriple};

use super::{rdl_names, CanonicalSentence, WrdlFormula};

fn distinct(ws: impl Iterator<Item = Weight>) -> Vec<Weight> {
    let mut out: Vec<Weight> = Vec::new();
    for w in ws {
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Letter `(a,m,m′)` of the extended alphabet.
pub fn gamma_letter(a: &str, m1: &Weight, m2: &Weight) -> String {
    format!("({a},{m1},{m2})")
}

/// `Γ = Σ × M¹ × M²`, `h` and `g` the projections, and the language
/// `∃V.∀y.β′` where `β′` ties the letter at `y` to the values of the guard
/// holding there. Branches whose second value is 0̄ contribute nothing and
/// are left out of `M¹`, `M²`.
pub fn sentence_to_nivat(psi: &CanonicalSentence, sigma: &[String], m: &TimedPvMonoid) -> Result<NivatTriple> {
    let live: Vec<_> = psi.branches.iter().filter(|b| &b.second != m.zero()).collect();
    let m1 = distinct(live.iter().map(|b| b.first.clone()));
    let m2 = distinct(live.iter().map(|b| b.second.clone()));
    let mut gamma = Vec::new();
    let mut h = BTreeMap::new();
    let mut g = BTreeMap::new();
    let mut by_letter: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for a in sigma {
        for x in &m1 {
            for z in &m2 {
                let name = gamma_letter(a, x, z);
                gamma.push(name.clone());
                h.insert(name.clone(), a.clone());
                g.insert(name.clone(), (x.clone(), z.clone()));
                by_letter.entry(a.clone()).or_default().push(name);
            }
        }
    }
    let relabel = |f: &RdlFormula| {
        f.map_letters(&|a, x| {
            RdlFormula::or_all(by_letter.get(a).into_iter().flatten().map(|gm| RdlFormula::letter(gm.clone(), x)))
        })
    };
    let guards: Vec<RdlFormula> = live.iter().map(|b| relabel(&b.guard.to_formula())).collect();
    let mut disjuncts = Vec::new();
    for gm in &gamma {
        let (x, z) = &g[gm];
        let matching: Vec<RdlFormula> = live
            .iter()
            .zip(&guards)
            .filter(|(b, _)| &b.first == x && &b.second == z)
            .map(|(_, f)| f.clone())
            .collect();
        if !matching.is_empty() {
            disjuncts.push(RdlFormula::letter(gm.clone(), psi.y.clone()).and(RdlFormula::or_all(matching)));
        }
    }
    let beta = RdlFormula::forall(psi.y.clone(), RdlFormula::or_all(disjuncts));
    let d = beta.distance_sets();
    let (in_d, rest): (Vec<&String>, Vec<&String>) = psi.vars.iter().partition(|v| d.contains(*v));
    let inner = rest.iter().rev().fold(beta, |acc, v| RdlFormula::exists_set((*v).clone(), acc));
    let sentence = in_d.iter().rev().fold(inner, |acc, v| RdlFormula::exists_set((*v).clone(), acc));
    Ok(NivatTriple { gamma, h, g, language: Language::Sentence(sentence), class: LanguageClass::Sentence })
}

/// Splits `∃D.β″` into the distance variables and `β″`.
fn split_prefix(beta: &RdlFormula) -> Option<(Vec<String>, RdlFormula)> {
    let mut prefix = Vec::new();
    let mut body = beta;
    loop {
        let vars: BTreeSet<String> = prefix.iter().cloned().collect();
        if vars.len() == prefix.len() && vars == body.distance_sets() && in_rdl_past(body) {
            return Some((prefix, body.clone()));
        }
        match body {
            RdlFormula::ExistsSO(x, inner) => {
                prefix.push(x.clone());
                body = inner;
            }
            _ => return None,
        }
    }
}

/// The weighted sentence
/// `∃(V ∪ D).[B(β″ ∧ Part ∧ H) ∧ ∀x.(⋁ B(X_γ(x)) ∧ g₁(γ), ⋁ B(X_γ(x)) ∧ g₂(γ))]`
/// where the fresh `X_γ` encode a preimage of the input word.
pub fn nivat_to_sentence(t: &NivatTriple, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    t.validate()?;
    let Language::Sentence(beta) = &t.language else {
        return Err(Error::Fragment("the language must be given as a sentence".into()));
    };
    if !rdl_classify(beta).exists_rdl_past_sentence {
        return Err(Error::Fragment(format!("language is not an existential distance-past sentence: {beta}")));
    }
    let mut used = rdl_names(beta);
    let mut fresh = |base: String| {
        let mut name = base.clone();
        let mut k = 1;
        while used.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        used.insert(name.clone());
        name
    };
    let xs: BTreeMap<&String, String> = t.gamma.iter().enumerate().map(|(k, gm)| (gm, fresh(format!("G{k}")))).collect();
    let x = fresh("x".into());
    if t.gamma.is_empty() {
        return Ok(WrdlFormula::Bool(RdlFormula::ff()));
    }
    let relabeled = beta.map_letters(&|gm, v| match xs.get(&gm.to_string()) {
        Some(set) => RdlFormula::letter(t.h[gm].clone(), v).and(RdlFormula::in_set(set.clone(), v)),
        None => RdlFormula::ff(),
    });
    let (dvars, body) = split_prefix(&relabeled)
        .ok_or_else(|| Error::Fragment("relabeled language lost its existential shape".into()))?;
    let member = |gm: &String| RdlFormula::in_set(xs[gm].clone(), x.clone());
    // Cover plus pairwise disjointness, so that a clash is already visible
    // once both sets are fixed.
    let cover = RdlFormula::forall(x.clone(), RdlFormula::or_all(t.gamma.iter().map(member)));
    let disjoint = RdlFormula::and_all(t.gamma.iter().enumerate().flat_map(|(i, g1)| {
        t.gamma[i + 1..].iter().map(|g2| RdlFormula::forall(x.clone(), member(g1).and(member(g2)).not()))
    }));
    let part = disjoint.and(cover);
    let labels = RdlFormula::forall(
        x.clone(),
        RdlFormula::and_all(t.gamma.iter().map(|gm| member(gm).not().or(RdlFormula::letter(t.h[gm].clone(), x.clone())))),
    );
    for (name, f) in [("Part", &part), ("H", &labels)] {
        if !rdl_classify(f).in_rdl_past {
            return Err(Error::Fragment(format!("{name} left the distance-past fragment")));
        }
    }
    let side = |pick: fn(&(Weight, Weight)) -> &Weight| {
        WrdlFormula::or_all(
            t.gamma.iter().map(|gm| WrdlFormula::Bool(member(gm)).and(WrdlFormula::Const(pick(&t.g[gm]).clone()))),
        )
        .expect("non-empty alphabet")
    };
    let _ = m;
    let weighted = WrdlFormula::Bool(labels.and(part).and(body)).and(WrdlFormula::forall(
        x.clone(),
        side(|p| &p.0),
        side(|p| &p.1),
    ));
    let quantified: Vec<String> = t.gamma.iter().map(|gm| xs[gm].clone()).chain(dvars).collect();
    Ok(quantified.into_iter().rev().fold(weighted, |acc, v| WrdlFormula::exists_set(v, acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::rdl::{parse_rdl, Assignment};
    use crate::timed::TimedWord;
    use crate::transform::{nivat_eval, DEFAULT_PREIMAGE_CAP};
    use crate::wrdl::{canonicalize, parse_wrdl, wrdl_classify, wrdl_eval, Branch, Guard};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const AVG: &str = "all x.(B(P[a](x)) & 1 | B(P[b](x)) & 2, B(P[a](x)) & 0 | B(P[b](x)) & 1)";

    fn sigma() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> TimedWord {
        let n = rng.gen_range(1..=max_len);
        TimedWord::new(
            (0..n).map(|_| (["a", "b"][rng.gen_range(0..2)].to_string(), q(rng.gen_range(0..7), rng.gen_range(1..3)))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn average_sentence_to_triple() {
        let m = TimedPvMonoid::avg0();
        let phi = parse_wrdl(AVG, &m).unwrap();
        let c = canonicalize(&phi, &m).unwrap();
        let t = sentence_to_nivat(&c, &sigma(), &m).unwrap();
        t.validate().unwrap();
        assert_eq!(t.gamma.len(), 8);
        let Language::Sentence(l) = &t.language else { panic!() };
        assert!(rdl_classify(l).exists_rdl_past_sentence);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let w = random_word(&mut rng, 4);
            let expected = wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap();
            assert_eq!(nivat_eval(&t, &w, &m.base, DEFAULT_PREIMAGE_CAP).unwrap(), expected, "{w}");
        }
    }

    #[test]
    fn triple_matches_sentence_with_set_variables() {
        let m = TimedPvMonoid::sum0();
        let phi = parse_wrdl("EX X. all x.(B(dpast[>=2](X,x)) & 3 | B(P[b](x)) & 1, B(X(x)) & 1 | 0)", &m).unwrap();
        let c = canonicalize(&phi, &m).unwrap();
        let t = sentence_to_nivat(&c, &sigma(), &m).unwrap();
        let live: Vec<_> = c.branches.iter().filter(|b| !b.second.is_inf()).collect();
        let k1 = distinct(live.iter().map(|b| b.first.clone())).len();
        let k2 = distinct(live.iter().map(|b| b.second.clone())).len();
        assert_eq!(t.gamma.len(), sigma().len() * k1 * k2);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let w = random_word(&mut rng, 4);
            let expected = wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap();
            assert_eq!(nivat_eval(&t, &w, &m.base, DEFAULT_PREIMAGE_CAP).unwrap(), expected, "{w}");
        }
    }

    #[test]
    fn single_branch_closed_form() {
        let m = TimedPvMonoid::sum0();
        let c = CanonicalSentence {
            vars: vec![],
            y: "y".into(),
            branches: vec![Branch { guard: Guard::tt(), first: Weight::rat(3), second: Weight::rat(2) }],
        };
        let t = sentence_to_nivat(&c, &sigma(), &m).unwrap();
        let w = TimedWord::new(vec![("a".into(), q(1, 2)), ("b".into(), int(2))]).unwrap();
        assert_eq!(nivat_eval(&t, &w, &m.base, DEFAULT_PREIMAGE_CAP).unwrap(), Weight::Rat(q(15, 2) + int(4)));
    }

    #[test]
    fn identity_triple_to_sentence() {
        let m = TimedPvMonoid::sum0();
        let t = NivatTriple {
            gamma: sigma(),
            h: sigma().into_iter().map(|a| (a.clone(), a)).collect(),
            g: [("a".to_string(), (Weight::rat(1), Weight::rat(2))), ("b".to_string(), (Weight::rat(3), Weight::rat(0)))].into(),
            language: Language::Sentence(parse_rdl("ex x. true").unwrap()),
            class: LanguageClass::Sentence,
        };
        let phi = nivat_to_sentence(&t, &m).unwrap();
        let c = wrdl_classify(&phi);
        assert!(c.sentence && c.syntactically_restricted);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let w = random_word(&mut rng, 3);
            let direct = nivat_eval(&t, &w, &m.base, DEFAULT_PREIMAGE_CAP).unwrap();
            assert_eq!(wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap(), direct);
        }
    }

    #[test]
    fn distance_language_to_sentence() {
        let m = TimedPvMonoid::sum0();
        let t = NivatTriple {
            gamma: vec!["c".into(), "d".into()],
            h: [("c", "a"), ("d", "a")].iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
            g: [("c".to_string(), (Weight::rat(1), Weight::rat(0))), ("d".to_string(), (Weight::rat(2), Weight::rat(1)))].into(),
            language: Language::Sentence(parse_rdl("EX X. all x. (P[c](x) | dpast[>=1](X,x))").unwrap()),
            class: LanguageClass::Sentence,
        };
        let phi = nivat_to_sentence(&t, &m).unwrap();
        assert!(wrdl_classify(&phi).syntactically_restricted);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..12 {
            let n = rng.gen_range(1..=2);
            let w = TimedWord::new((0..n).map(|_| ("a".to_string(), q(rng.gen_range(0..5), 2))).collect()).unwrap();
            let direct = nivat_eval(&t, &w, &m.base, DEFAULT_PREIMAGE_CAP).unwrap();
            assert_eq!(wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap(), direct, "{w}");
        }
    }

    #[test]
    fn average_round_trip_through_both_translations() {
        let m = TimedPvMonoid::avg0();
        let phi = parse_wrdl(AVG, &m).unwrap();
        let t = sentence_to_nivat(&canonicalize(&phi, &m).unwrap(), &sigma(), &m).unwrap();
        let back = nivat_to_sentence(&t, &m).unwrap();
        assert!(wrdl_classify(&back).syntactically_restricted);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..6 {
            let w = random_word(&mut rng, 4);
            let a = wrdl_eval(&phi, &w, &Assignment::new(), &m).unwrap();
            assert_eq!(wrdl_eval(&back, &w, &Assignment::new(), &m).unwrap(), a, "{w}");
        }
    }

    #[test]
    fn rejects_non_existential_language() {
        let m = TimedPvMonoid::sum0();
        let t = NivatTriple {
            gamma: vec!["a".into()],
            h: [("a".to_string(), "a".to_string())].into(),
            g: [("a".to_string(), (Weight::rat(0), Weight::rat(0)))].into(),
            language: Language::Sentence(parse_rdl("EX Y. ex x. dpast[<=1](X,x) & Y(x) | !(EX X. ex z. dpast[<1](X,z))").unwrap()),
            class: LanguageClass::Sentence,
        };
        assert!(t.validate().is_err() || nivat_to_sentence(&t, &m).is_err());
    }
}
