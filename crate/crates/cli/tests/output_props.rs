use fraclap_cli::config::{parse_pairs, JobConfig};
use fraclap_cli::output::{fmt_g15, Cell, Table};
use proptest::prelude::*;

proptest! {
    #[test]
    fn g15_round_trips_to_fifteen_digits(v in prop::num::f64::NORMAL) {
        let s = fmt_g15(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-15 * v.abs(), "{v} -> {s}");
        let mantissa = s.split('e').next().unwrap();
        let significant = mantissa.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
        prop_assert!(significant <= 15, "{s}");
    }

    #[test]
    fn csv_and_json_agree(values in prop::collection::vec(-1e6f64..1e6, 1..20)) {
        let mut t = Table::new("t", vec![("mode".into(), "spectrum".into())], &["n", "v"]);
        for (i, v) in values.iter().enumerate() {
            t.push(vec![Cell::from(i), Cell::from(*v)]);
        }
        let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        let csv = t.to_csv();
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        prop_assert_eq!(body.len(), values.len());
        for (i, line) in body.iter().enumerate() {
            let v = line.split(',').nth(1).unwrap();
            prop_assert_eq!(json["rows"][i]["v"].as_str().unwrap(), v);
        }
    }

    #[test]
    fn config_parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse_pairs(&text);
        let _ = JobConfig::parse(&text, &[]);
    }

    #[test]
    fn whitespace_and_comments_are_ignored(pad in "[ \t]{0,3}", comment in "[a-z ]{0,10}") {
        let text = format!("{pad}mode{pad}={pad}spectrum{pad}# {comment}\nalpha = 2\npotential = free\nN = 4\n");
        let c = JobConfig::parse(&text, &[]).unwrap();
        prop_assert_eq!(c.alpha, 2.0);
    }
}
