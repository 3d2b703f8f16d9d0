use cfwords_core::complexity::{complexity_profile, verify_dendric};
use cfwords_core::mcfa::delta_directive;
use cfwords_core::words::sadic_prefix;
use cfwords_core::{DirectiveWord, Point};

fn check(w: &DirectiveWord, max_len: usize) {
    let r = verify_dendric(w, max_len).unwrap();
    assert!(r.primitive, "{w}");
    assert_eq!(r.routes_agree, Some(true), "{w}");
    assert!(r.all_dendric, "{w}");
    assert!(r.is_2n_plus_1, "{w}");
}

#[test]
fn periodic_directives_are_dendric() {
    check(&DirectiveWord::parse("(12)^w").unwrap(), 200);
    check(&DirectiveWord::parse("(112212)^w").unwrap(), 200);
}

#[test]
fn one_e_pi_is_dendric() {
    let x = Point::parse("1,e,pi", 512).unwrap();
    let dir = delta_directive(&x, 2000).unwrap();
    check(&dir, 200);
}

#[test]
fn square_blocks_give_eventually_n_plus_k() {
    let r = verify_dendric(&DirectiveWord::parse("(1122)^w").unwrap(), 200).unwrap();
    assert!(!r.primitive && !r.is_2n_plus_1);
    let k = r.eventual_offset.expect("eventually n + k");
    assert!(k > 0);
    eprintln!("(1122)^w: p(n) = n + {k}");
}

#[test]
fn fixed_point_profile_to_fifty() {
    let p = sadic_prefix(&DirectiveWord::parse("(12)^w").unwrap(), 20000).unwrap();
    let prof = complexity_profile(&p, 50).unwrap();
    assert!(prof.iter().enumerate().all(|(n, &c)| c == 2 * n as u64 + 1));
}
