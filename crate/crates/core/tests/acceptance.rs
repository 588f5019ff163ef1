//! Acceptance suite. Each criterion prints one PASS/FAIL line to stderr; the
//! test fails at the end if any criterion failed.

mod common;

use std::io::Write;

use colorhom::algebra::{AlgebraElement, LinearMap};
use colorhom::cli;
use colorhom::format;
use colorhom::hom_assoc::HomAssociative;
use colorhom::linalg::{same_span, RowSpace};
use colorhom::scalar::Scalar;
use colorhom::tensor::{alpha_t_with, theta_with, TensorAlgebra, TensorElement, Word};
use colorhom::uea::{all_words, build_alpha_stable_basis, NormalForm, Strategy};
use rand::Rng;

use common::*;

type Outcome = Result<(), Vec<String>>;

fn collect(failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures)
    }
}

fn criterion_1() -> Outcome {
    let mut fails = Vec::new();
    for name in FIXTURES {
        let a = fixture(name);
        let mut r = a.epsilon().verify();
        r.merge(a.verify());
        if !r.passed() {
            fails.push(format!("{name}: {r}"));
        }
    }
    for (base, twisted) in YAU_PAIRS {
        let t = fixture(twisted);
        match fixture(base).yau_twist(t.alpha()) {
            Ok(y) if y == t => {}
            Ok(_) => fails.push(format!("yau twist of {base} differs from {twisted}")),
            Err(e) => fails.push(format!("yau twist of {base}: {e}")),
        }
    }
    let sabotage = [
        ("skew", "skew-symmetry", "(x,y)"),
        ("jacobi", "hom-jacobi", "(a,b,c)"),
        ("grading", "grading", "(x,y)"),
        ("alpha_odd", "alpha-even", "x"),
        ("involutive", "alpha-involutive", "e1"),
        ("multiplicative", "alpha-multiplicative", "(x,y)"),
        ("epsilon", "factor-axiom-iii", "(1|1)"),
    ];
    for (file, check, witness) in sabotage {
        let a = fixture(&format!("sabotage/{file}"));
        let mut r = a.epsilon().verify();
        r.merge(a.verify());
        if !r.has(check, witness) {
            fails.push(format!("sabotage/{file}: expected {check} at {witness}, got {r}"));
        }
    }
    match format::parse_algebra(&fixture_text("sabotage/malformed_scalar.alg")) {
        Ok(_) => fails.push("malformed_scalar parsed".into()),
        Err(e) if e.line == 6 && e.field == 5 => {}
        Err(e) => fails.push(format!("malformed_scalar: unexpected error {e}")),
    }
    collect(fails)
}

/// `α^k` applied `k` times, no parity shortcut.
fn alpha_pow(alpha: &LinearMap, x: &AlgebraElement, k: usize) -> AlgebraElement {
    (0..k).fold(x.clone(), |acc, _| alpha.apply(&acc))
}

/// Splits `whole = prefix ⊗ c` using one word of `prefix` and returns `c`.
fn right_factor(whole: &TensorElement, prefix: &TensorElement) -> TensorElement {
    let (p, lambda) = prefix.terms().next().expect("nonzero prefix");
    let inv = lambda.inv().unwrap();
    let k = p.len();
    TensorElement::from_terms(
        whole
            .terms()
            .filter(|(w, _)| w.len() > k && w.letters()[..k] == *p.letters())
            .map(|(w, c)| (Word::new(w.letters()[k..].to_vec()).unwrap(), c * &inv)),
    )
}

fn criterion_2() -> Outcome {
    let mut fails = Vec::new();
    let mut r = rng(2);
    let twists: Vec<(usize, LinearMap)> = (0..12)
        .map(|i| {
            let n = 1 + i % 3;
            (n, random_involution(&mut r, n))
        })
        .collect();
    let pick = |r: &mut rand_chacha::ChaCha8Rng| twists[r.gen_range(0..twists.len())].clone();

    let mut triples = 0;
    while triples < 1000 {
        let (n, alpha) = pick(&mut r);
        let t = TensorAlgebra::from_twist(alpha);
        let l1 = r.gen_range(1..=4);
        let l2 = r.gen_range(1..=5 - l1);
        let l3 = r.gen_range(1..=6 - l1 - l2);
        let x = random_tensor(&mut r, n, l1, 3);
        let y = random_tensor(&mut r, n, l2, 3);
        let z = random_tensor(&mut r, n, l3, 3);
        let lhs = t.mul(&t.twist(&x), &t.mul(&y, &z));
        let rhs = t.mul(&t.mul(&x, &y), &t.twist(&z));
        if lhs != rhs {
            fails.push(format!("hom-associativity fails for lengths ({l1},{l2},{l3})"));
            break;
        }
        triples += 1;
    }

    for _ in 0..500 {
        let (n, alpha) = pick(&mut r);
        let len = r.gen_range(1..=6);
        let u = random_tensor(&mut r, n, len, 4);
        if alpha_t_with(&alpha, &alpha_t_with(&alpha, &u)) != u {
            fails.push("alpha_T^2 != id".into());
            break;
        }
        if theta_with(&alpha, &theta_with(&alpha, &u)) != u {
            fails.push("theta^2 != id".into());
            break;
        }
    }

    // (i) closed form of θ on pure tensors
    for _ in 0..500 {
        let (n, alpha) = pick(&mut r);
        let j = r.gen_range(1..=5);
        let u: Vec<AlgebraElement> = (0..j).map(|_| random_element(&mut r, n)).collect();
        let expected: Vec<AlgebraElement> = u
            .iter()
            .enumerate()
            .map(|(i, x)| if i == 0 { x.clone() } else { alpha_pow(&alpha, x, i - 1) })
            .collect();
        if theta_with(&alpha, &pure(&u)) != pure(&expected) {
            fails.push(format!("lemma (i) fails at length {j}"));
            break;
        }
    }

    // (ii) θ∘α_T = α_T∘θ
    for _ in 0..500 {
        let (n, alpha) = pick(&mut r);
        let len = r.gen_range(1..=6);
        let u = random_tensor(&mut r, n, len, 4);
        if theta_with(&alpha, &alpha_t_with(&alpha, &u)) != alpha_t_with(&alpha, &theta_with(&alpha, &u)) {
            fails.push("lemma (ii) fails".into());
            break;
        }
    }

    // (iii) θ(u⊗w) = θ(u) ⊗ α^{j−1}(w₁) ⊗ ⋯ ⊗ α^{j+l−2}(w_l)
    for _ in 0..500 {
        let (n, alpha) = pick(&mut r);
        let j = r.gen_range(1..=3);
        let l = r.gen_range(1..=4);
        let u: Vec<AlgebraElement> = (0..j).map(|_| random_element(&mut r, n)).collect();
        let w: Vec<AlgebraElement> = (0..l).map(|_| random_element(&mut r, n)).collect();
        let mut uw = u.clone();
        uw.extend(w.iter().cloned());
        let tail: Vec<AlgebraElement> = w
            .iter()
            .enumerate()
            .map(|(i, x)| alpha_pow(&alpha, x, j - 1 + i))
            .collect();
        let rhs = theta_with(&alpha, &pure(&u)).tensor(&pure(&tail));
        if theta_with(&alpha, &pure(&uw)) != rhs {
            fails.push(format!("lemma (iii) fails for j={j}, l={l}"));
            break;
        }
    }

    // (iv) θ(u⊗w) = θ(u)⊗c and θ(v⊗w) = θ(v)⊗α_T(c) for |u| = k+1, |v| = k
    let mut done = 0;
    while done < 500 {
        let (n, alpha) = pick(&mut r);
        let k = r.gen_range(1..=3);
        let l = r.gen_range(1..=3);
        let u = random_tensor(&mut r, n, k + 1, 3);
        let v = random_tensor(&mut r, n, k, 3);
        let w = random_tensor(&mut r, n, l, 3);
        let tu = theta_with(&alpha, &u);
        if tu.is_zero() {
            continue;
        }
        let tuw = theta_with(&alpha, &u.tensor(&w));
        let c = right_factor(&tuw, &tu);
        if tu.tensor(&c) != tuw {
            fails.push(format!("lemma (iv) first identity fails for k={k}"));
            break;
        }
        if theta_with(&alpha, &v.tensor(&w)) != theta_with(&alpha, &v).tensor(&alpha_t_with(&alpha, &c)) {
            fails.push(format!("lemma (iv) second identity fails for k={k}"));
            break;
        }
        done += 1;
    }
    collect(fails)
}

fn criterion_3() -> Outcome {
    let mut fails = Vec::new();
    for (name, ctx) in constructible() {
        for max_len in 2..=3 {
            let index = WordIndex::new(ctx.dim(), max_len);
            let ideal: Vec<_> = ctx
                .ideal_generators(max_len)
                .unwrap()
                .iter()
                .map(|g| index.row(&ctx.theta(g)))
                .collect();
            let j: Vec<_> = ctx.j_mu_generators(max_len).unwrap().iter().map(|g| index.row(g)).collect();
            if !same_span(&RowSpace::from_rows(&ideal), &RowSpace::from_rows(&j)) {
                fails.push(format!("{name}: theta(I) != J at max_len {max_len}"));
            }
        }
    }
    collect(fails)
}

fn criterion_4() -> Outcome {
    let mut fails = Vec::new();
    for (name, ctx) in constructible() {
        for max_len in 2..=4 {
            let o = ctx.decomposition_oracle(max_len).unwrap();
            if !o.passed() {
                fails.push(format!("{name} at max_len {max_len}: {}", o.report));
            }
        }
    }
    let h = build_alpha_stable_basis(&fixture("heisenberg")).unwrap();
    let o = h.decomposition_oracle(2).unwrap();
    let got = (o.rank_j, o.pbw_count, o.dim_t);
    if got != (3, 9, 12) {
        fails.push(format!(
            "heisenberg at max_len 2: (rank J, #W, dim T) = {got:?}, expected (3, 9, 12); \
             non-increasing words = {}",
            o.non_increasing_count
        ));
    }
    collect(fails)
}

fn criterion_5() -> Outcome {
    let mut fails = Vec::new();
    let mut r = rng(5);
    for (name, ctx) in constructible() {
        for _ in 0..1000 {
            let len = r.gen_range(1..=5);
            let t = TensorElement::word(random_word(&mut r, ctx.dim(), len));
            let left = ctx.straighten(&t, Strategy::Leftmost).unwrap();
            let right = ctx.straighten(&t, Strategy::Rightmost).unwrap();
            if left != right {
                fails.push(format!("{name}: strategies disagree on {}", t.display(ctx.x_names())));
                break;
            }
        }
    }
    collect(fails)
}

fn criterion_6() -> Outcome {
    let mut fails = Vec::new();
    for (name, ctx) in constructible() {
        for g in ctx.ideal_generators(4).unwrap() {
            let nf = ctx.normal_form(&g).unwrap();
            if !nf.is_zero() {
                fails.push(format!("{name}: generator {} survives", g.display(ctx.x_names())));
                break;
            }
        }
        for len in 1..=4 {
            for w in ctx.pbw_words(len) {
                let t = TensorElement::word(w.clone());
                let nf = ctx.normal_form(&ctx.theta(&t)).unwrap();
                if *nf.as_tensor() != t {
                    fails.push(format!("{name}: theta({}) is not a basis vector", w.display(ctx.x_names())));
                    break;
                }
            }
        }
    }
    collect(fails)
}

fn criterion_7() -> Outcome {
    let mut fails = Vec::new();
    for (name, ctx) in constructible() {
        let r = ctx.psi_check().unwrap();
        if !r.passed() {
            fails.push(format!("{name}: {r}"));
        }
    }
    // corrupting ε(odd, odd) must be detected
    let ctx = build_alpha_stable_basis(&fixture("heisenberg")).unwrap();
    let eps = ctx.original().epsilon();
    let odd = ctx.original().basis().degree(0).clone();
    let bad = ctx.with_epsilon(eps.with_value(&odd, &odd, Scalar::one()));
    if bad.psi_check().unwrap().passed() {
        fails.push("corrupted commutation factor not detected".into());
    }
    collect(fails)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["colorhom"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    (code, out)
}

fn criterion_8() -> Outcome {
    let mut fails = Vec::new();
    for name in ["abelian1", "abelian2", "sl2"] {
        let a = fixture(name);
        let ctx = build_alpha_stable_basis(&a).unwrap();
        if !ctx.change_of_basis().is_identity() {
            fails.push(format!("{name}: eigenbasis is not the original basis"));
            continue;
        }
        let oracle = ClassicalPbw { algebra: &a };
        for len in 1..=3 {
            for w in all_words(a.dim(), len) {
                let t = TensorElement::word(Word::new(w).unwrap());
                let ours = ctx.normal_form(&t).unwrap();
                if *ours.as_tensor() != oracle.normal_form(&t) {
                    fails.push(format!("{name}: normal form of {} differs", t.display(a.basis().names())));
                }
            }
        }
        let pbw: Vec<Word> = (1..=2).flat_map(|l| ctx.pbw_words(l)).collect();
        for u in &pbw {
            for v in &pbw {
                if u.len() + v.len() > 3 {
                    continue;
                }
                let nu = NormalForm::from_pbw(&ctx, TensorElement::word(u.clone())).unwrap();
                let nv = NormalForm::from_pbw(&ctx, TensorElement::word(v.clone())).unwrap();
                let ours = ctx.multiply(&nu, &nv).unwrap();
                let expected = oracle.normal_form(&TensorElement::word(u.concat(v)));
                if *ours.as_tensor() != expected {
                    fails.push(format!("{name}: product of {u:?} and {v:?} differs"));
                }
            }
        }
    }

    let (code, preset) = run_cli(&[
        "super-preset",
        "--names",
        "x,y,z",
        "--parities",
        "1,1,0",
        "--bracket",
        "x y = z:1",
        "--bracket",
        "y x = z:1",
    ]);
    if code != cli::EXIT_OK {
        fails.push(format!("super-preset exited with {code}"));
        return collect(fails);
    }
    let dir = std::env::temp_dir().join(format!("colorhom-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let preset_path = dir.join("preset.alg");
    std::fs::write(&preset_path, &preset).unwrap();
    let generic = fixture_path("heisenberg.alg");
    let (p, g) = (preset_path.to_str().unwrap(), generic.to_str().unwrap());
    let xy = fixture_path("elements/h_xy.elem");
    let pbw = fixture_path("elements/h_pbw.elem");
    let left = fixture_path("elements/hs_left.elem");
    let right = fixture_path("elements/hs_right.elem");
    let e = |p: &std::path::PathBuf| p.to_str().unwrap().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["normalize".into(), e(&xy)],
        vec!["normalize".into(), e(&pbw), "--strategy".into(), "rightmost".into()],
        vec!["multiply".into(), e(&left), e(&right)],
        vec!["pbw-check".into(), "--max-len".into(), "3".into()],
        vec!["verify".into()],
        vec!["--format".into(), "structured".into(), "multiply".into(), e(&pbw), e(&left)],
    ];
    for args in runs {
        let with = |spec: &str| {
            let mut v: Vec<&str> = Vec::new();
            let mut it = args.iter();
            // the definition file goes right after the subcommand
            for a in it.by_ref() {
                v.push(a);
                if !a.starts_with('-') && a != "structured" {
                    break;
                }
            }
            v.push(spec);
            v.extend(it.map(|s| s.as_str()));
            run_cli(&v)
        };
        let (cp, op) = with(p);
        let (cg, og) = with(g);
        if cp != cg || op != og {
            fails.push(format!("preset and generic outputs differ for {args:?}"));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    collect(fails)
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = Vec::new();
    let mut stderr = std::io::stderr();
    for (n, f) in criteria {
        match f() {
            Ok(()) => {
                let _ = writeln!(stderr, "criterion {n}: PASS");
            }
            Err(details) => {
                let _ = writeln!(stderr, "criterion {n}: FAIL");
                for d in &details {
                    let _ = writeln!(stderr, "  {d}");
                }
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
