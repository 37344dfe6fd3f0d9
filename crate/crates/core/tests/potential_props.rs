use fraclap_core::potential::{parse, Expr};
use proptest::prelude::*;

/// Single-pass interpreter over the source text; shares no code with the
/// library parser.
struct Direct<'a> {
    s: &'a [u8],
    i: usize,
    x: f64,
}

impl Direct<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> f64 {
        let mut v = self.term();
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let r = self.term();
            v = if c == b'+' { v + r } else { v - r };
        }
        v
    }

    fn term(&mut self) -> f64 {
        let mut v = self.factor();
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let r = self.factor();
            v = if c == b'*' { v * r } else { v / r };
        }
        v
    }

    fn factor(&mut self) -> f64 {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return -self.factor();
        }
        let base = self.atom();
        if self.peek() == Some(b'^') {
            self.i += 1;
            let e = self.factor();
            if e.fract() == 0.0 && e.abs() < 1e9 {
                return base.powi(e as i32);
            }
            return base.powf(e);
        }
        base
    }

    fn atom(&mut self) -> f64 {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr();
                assert_eq!(self.peek(), Some(b')'));
                self.i += 1;
                v
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                if self.i < self.s.len() && matches!(self.s[self.i], b'e' | b'E') {
                    self.i += 1;
                    if matches!(self.s.get(self.i), Some(b'+' | b'-')) {
                        self.i += 1;
                    }
                    while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                        self.i += 1;
                    }
                }
                std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().unwrap()
            }
            Some(_) => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                match name {
                    "x" => self.x,
                    "pi" => std::f64::consts::PI,
                    f => {
                        let arg = self.atom();
                        match f {
                            "sin" => arg.sin(),
                            "cos" => arg.cos(),
                            "exp" => arg.exp(),
                            "abs" => arg.abs(),
                            "sqrt" => arg.sqrt(),
                            other => panic!("unknown function {other}"),
                        }
                    }
                }
            }
            None => panic!("unexpected end"),
        }
    }
}

fn direct(src: &str, x: f64) -> f64 {
    let mut d = Direct {
        s: src.as_bytes(),
        i: 0,
        x,
    };
    let v = d.expr();
    assert_eq!(d.peek(), None, "trailing input in {src}");
    v
}

/// Expressions that stay finite and real for any x: no division, bounded
/// exponents, sqrt only of abs(...).
fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("pi".to_string()),
        (0u32..50).prop_map(|n| n.to_string()),
        (0.0f64..10.0).prop_map(|v| format!("{v:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            (inner.clone(), 0u32..4).prop_map(|(a, e)| format!("({a})^{e}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("abs({a})")),
            inner.clone().prop_map(|a| format!("sqrt(abs({a}))")),
            inner.prop_map(|a| format!("exp(sin({a}))")),
        ]
    })
}

fn same_value(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-15 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn display_reparses_to_identical_tree(src in source()) {
        let e = parse(&src).unwrap();
        let again = parse(&e.to_string()).unwrap();
        prop_assert_eq!(e.ast(), again.ast());
    }

    #[test]
    fn evaluation_matches_direct_interpreter(src in source(), x in -3.0f64..3.0) {
        let e = parse(&src).unwrap();
        let got = e.evaluate(x);
        let want = direct(&src, x);
        match got {
            Ok(v) => prop_assert!(same_value(v, want), "{} at {}: {} vs {}", src, x, v, want),
            Err(_) => prop_assert!(!want.is_finite()),
        }
    }

    #[test]
    fn parser_never_panics(src in "[-+*/^()x0-9a-z. ]{0,24}") {
        let _ = parse(&src);
    }
}

#[test]
fn unary_minus_binds_looser_than_power() {
    let e = parse("-x^2").unwrap();
    assert!(matches!(e.ast(), Expr::Neg(_)));
    assert_eq!(e.evaluate(3.0).unwrap(), -9.0);
}

#[test]
fn power_is_right_associative() {
    assert_eq!(parse("2^3^2").unwrap().evaluate(0.0).unwrap(), 512.0);
}

#[test]
fn oscillator_diagonal_matches_direct_squares() {
    let g = fraclap_core::make_grid(fraclap_core::BasisKind::Dirichlet, 50, 8.518).unwrap();
    let v = parse("x^2").unwrap();
    for &x in g.points() {
        assert_eq!(v.evaluate(x).unwrap(), x * x);
    }
}
