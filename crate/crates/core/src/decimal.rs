//! Serde adapters for `BigUint`: values that fit in `u64` are written as
//! plain JSON numbers, larger ones as decimal strings. Both forms are
//! accepted on input.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    match value.to_u64() {
        Some(v) => ser.serialize_u64(v),
        None => ser.serialize_str(&value.to_str_radix(10)),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
    de.deserialize_any(BigVisitor)
}

struct BigVisitor;

impl<'de> Visitor<'de> for BigVisitor {
    type Value = BigUint;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a nonnegative integer or a decimal string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigUint, E> {
        Ok(BigUint::from(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigUint, E> {
        u64::try_from(v)
            .map(BigUint::from)
            .map_err(|_| E::custom("negative integer"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigUint, E> {
        if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
            return Err(E::custom(format!("not a decimal integer: {v:?}")));
        }
        BigUint::parse_bytes(v.as_bytes(), 10).ok_or_else(|| E::custom("not a decimal integer"))
    }
}

pub mod seq {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[BigUint], ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&Wrapped(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigUint>, D::Error> {
        de.deserialize_seq(SeqVisitor)
    }

    struct Wrapped<'a>(&'a BigUint);

    impl serde::Serialize for Wrapped<'_> {
        fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
            super::serialize(self.0, ser)
        }
    }

    struct Owned(BigUint);

    impl<'de> serde::Deserialize<'de> for Owned {
        fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
            super::deserialize(de).map(Owned)
        }
    }

    struct SeqVisitor;

    impl<'de> Visitor<'de> for SeqVisitor {
        type Value = Vec<BigUint>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a sequence of nonnegative integers")
        }

        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<BigUint>, A::Error> {
            let mut out = Vec::new();
            while let Some(Owned(v)) = seq.next_element()? {
                out.push(v);
            }
            Ok(out)
        }
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<BigUint>, ser: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => super::serialize(v, ser),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<BigUint>, D::Error> {
        struct OptVisitor;

        impl<'de> Visitor<'de> for OptVisitor {
            type Value = Option<BigUint>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("null or a nonnegative integer")
            }

            fn visit_none<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }

            fn visit_unit<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }

            fn visit_some<D: Deserializer<'de>>(self, de: D) -> Result<Self::Value, D::Error> {
                super::deserialize(de).map(Some)
            }
        }

        de.deserialize_option(OptVisitor)
    }
}
