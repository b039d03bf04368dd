//! Most general unifiers, composition and the occurs check.

use rever::terms::{apply, compose, mgu, mgu_with};
use rever::{parse_query, Term};

fn main() {
    let q = parse_query("eq(f(X,b), f(a,Y))").unwrap();
    let (s, t) = (&q.atoms[0].args[0], &q.atoms[0].args[1]);
    let sigma = mgu(s, t).unwrap();
    println!("mgu({s}, {t}) = {sigma}");
    println!("instance: {}", apply(s, &sigma));

    let x = Term::var("X");
    let fx = Term::app("f", vec![x.clone()]);
    println!("X = f(X) with occurs check: {:?}", mgu(&x, &fx).ok());
    println!("X = f(X) without: {:?}", mgu_with(&x, &fx, false).ok().map(|s| s.to_string()));

    let a = mgu(&Term::var("Y"), &Term::var("Z")).unwrap();
    let b = mgu(&Term::var("Z"), &Term::constant("c")).unwrap();
    println!("{a} then {b} = {}", compose(&a, &b));
}
