//! Serde helpers for report formatting.

/// Floats that may be infinite: finite values are plain JSON numbers,
/// infinities are the strings `"inf"` and `"-inf"`.
pub mod ext_f64 {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(D::Error::custom),
            },
        }
    }
}

/// Floats written as decimal strings with 17 significant digits.
pub mod dec17 {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn format(v: f64) -> String {
        if v.is_finite() {
            format!("{v:.16e}")
        } else if v > 0.0 {
            "inf".to_string()
        } else if v < 0.0 {
            "-inf".to_string()
        } else {
            "nan".to_string()
        }
    }

    pub fn parse(s: &str) -> Result<f64, std::num::ParseFloatError> {
        s.parse()
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_some(&super::format(*x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let s: Option<String> = Option::deserialize(d)?;
            s.map(|t| super::parse(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dec17_round_trips() {
        for v in [0.1, -6.0, 1.0 / 3.0, 1e-300, 12345.678901234567] {
            let s = dec17::format(v);
            assert_eq!(dec17::parse(&s).unwrap(), v);
        }
        assert_eq!(dec17::format(1.0), "1.0000000000000000e0");
    }
}
