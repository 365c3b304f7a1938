//! Plain-text instance files.
//!
//! ```text
//! # comment lines start with '#'
//! <n> <capacity> <delta>
//! <mu_1> <w_1>
//! ...
//! <mu_n> <w_n>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, ProfitModel};

/// Parses an instance; the result is named `"instance"`.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line `<n> <capacity> <delta>`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            header_line,
            format!("header needs 3 fields `<n> <capacity> <delta>`, found {}", fields.len()),
        ));
    }
    let n: usize = number(header_line, fields[0], "item count")?;
    let capacity: u64 = number(header_line, fields[1], "capacity")?;
    let delta: f64 = number(header_line, fields[2], "delta")?;
    if n == 0 {
        return Err(Error::parse(header_line, "item count must be positive"));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::parse(header_line, "delta must be finite and >= 0"));
    }

    let mut items = Vec::with_capacity(n);
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if items.len() == n {
            return Err(Error::parse(
                line_no,
                format!("header declares {n} items but more item lines follow"),
            ));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                line_no,
                format!("item line needs 2 fields `<mu> <weight>`, found {}", fields.len()),
            ));
        }
        let mu: f64 = number(line_no, fields[0], "expected profit")?;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::parse(line_no, "expected profit must be finite and >= 0"));
        }
        let weight: u64 = number(line_no, fields[1], "weight")?;
        if weight == 0 {
            return Err(Error::parse(line_no, "weight must be positive"));
        }
        items.push(Item { mu, weight });
    }
    if items.len() < n {
        return Err(Error::parse(
            last_line + 1,
            format!("header declares {n} items, found only {}", items.len()),
        ));
    }
    Instance::new("instance", capacity, items, ProfitModel::uniform(delta)?)
}

fn number<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("{what}: {field:?} is not a valid number")))
}

/// Canonical text for `instance`. Floats are written in their shortest
/// round-tripping form, so parsing the output recovers the same values.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::with_capacity(16 * (instance.n() + 1));
    let _ = writeln!(out, "{} {} {}", instance.n(), instance.capacity(), instance.delta());
    for item in instance.items() {
        let _ = writeln!(out, "{} {}", item.mu, item.weight);
    }
    out
}

/// Reads an instance file, naming the instance after the file stem.
pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    Ok(parse_instance(&text)?.with_name(name))
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_instance(instance)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_instance, CapacityRule, InstanceKind};
    use proptest::prelude::*;

    #[test]
    fn header_and_items_map_directly() {
        let inst = parse_instance("3 7 0\n10 5\n8 4\n6 3\n").unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.capacity(), 7);
        assert_eq!(inst.delta(), 0.0);
        assert_eq!(inst.items()[1], Item { mu: 8.0, weight: 4 });
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let inst = parse_instance("# tiny\n3 7 2.5\n\n10 5\n# middle\n8 4\n6 3").unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.delta(), 2.5);
    }

    #[test]
    fn missing_item_reported_after_last_line() {
        let err = parse_instance("3 7 0\n10 5\n8 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn malformed_input_names_the_line() {
        let cases = [
            ("3 7\n", 1),
            ("x 7 0\n1 1\n", 1),
            ("1 7 0\n1 0\n", 2),
            ("2 7 0\n1 1\n1 abc\n", 3),
            ("1 7 0\n1 1\n2 2\n", 3),
            ("1 7 0\n-1 1\n", 2),
            ("", 1),
        ];
        for (text, line) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn single_item_is_two_lines() {
        let inst = parse_instance("1 1 0\n1 1\n").unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text, "1 1 0\n1 1\n");
    }

    #[test]
    fn equal_instances_serialize_identically() {
        let a = generate_instance(InstanceKind::Uncorrelated, 20, 100, CapacityRule::Fixed(9), 5).unwrap();
        let b = a.clone();
        assert_eq!(serialize_instance(&a).as_bytes(), serialize_instance(&b).as_bytes());
    }

    #[test]
    fn file_round_trip_uses_stem_as_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("uncorr_10.txt");
        let inst = generate_instance(InstanceKind::Uncorrelated, 10, 50, CapacityRule::Fixed(30), 1).unwrap();
        write_instance(&path, &inst).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(
            n in 1usize..60,
            range in 1u64..20_000,
            fraction in 0.0f64..1.5,
            strong in any::<bool>(),
            seed in any::<u64>(),
            delta in prop_oneof![Just(0.0), Just(25.0), 0.0f64..1e3],
        ) {
            let kind = if strong {
                InstanceKind::BoundedStronglyCorrelated
            } else {
                InstanceKind::Uncorrelated
            };
            let inst = generate_instance(kind, n, range, CapacityRule::Fraction(fraction), seed)
                .unwrap()
                .with_delta(delta)
                .unwrap()
                .with_name("instance");
            let back = parse_instance(&serialize_instance(&inst)).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
