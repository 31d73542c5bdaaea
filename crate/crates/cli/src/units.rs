//! Dimensioned quantities as they appear in configuration files: `{"value": 40, "unit": "m/min"}`.
//!
//! Each quantity type only accepts units of its own dimension, so a wrong unit is reported by
//! the JSON parser together with its line and column.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

/// A physical dimension with its accepted unit spellings and their SI factors.
pub trait Dimension: Copy + fmt::Debug + PartialEq + 'static {
    const NAME: &'static str;
    const UNITS: &'static [(&'static str, f64)];

    fn factor(unit: &str) -> Option<f64> {
        Self::UNITS.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)
    }
}

macro_rules! dimension {
    ($name:ident, $label:literal, [$(($unit:literal, $factor:expr)),+ $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;

        impl Dimension for $name {
            const NAME: &'static str = $label;
            const UNITS: &'static [(&'static str, f64)] = &[$(($unit, $factor)),+];
        }
    };
}

dimension!(Length, "length", [("m", 1.0), ("cm", 1e-2), ("mm", 1e-3)]);
dimension!(Angle, "angle", [("rad", 1.0), ("deg", std::f64::consts::PI / 180.0)]);
dimension!(Speed, "speed", [("m/s", 1.0), ("mm/s", 1e-3), ("m/min", 1.0 / 60.0)]);
dimension!(Time, "time", [("s", 1.0), ("ms", 1e-3)]);
dimension!(Mass, "mass", [("kg", 1.0), ("g", 1e-3)]);
dimension!(Force, "force", [("N", 1.0)]);
dimension!(Torque, "torque", [("N*m", 1.0), ("N.m", 1.0), ("Nm", 1.0)]);
dimension!(Acceleration, "acceleration", [("m/s^2", 1.0)]);
dimension!(Resistance, "resistance", [("ohm", 1.0)]);
dimension!(Inductance, "inductance", [("H", 1.0), ("mH", 1e-3)]);
dimension!(TorqueConstant, "torque constant", [("N*m/A", 1.0), ("Nm/A", 1.0)]);
dimension!(EmfConstant, "back-EMF constant", [("V*s/rad", 1.0), ("V/(rad/s)", 1.0)]);
dimension!(Ratio, "transmission ratio", [("rad/m", 1.0), ("rad/mm", 1e3)]);

/// A value with an explicit unit of dimension `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity<D> {
    pub value: f64,
    pub unit: String,
    _dim: PhantomData<D>,
}

impl<D: Dimension> Quantity<D> {
    pub fn new(value: f64, unit: &str) -> Result<Self, String> {
        if D::factor(unit).is_none() {
            return Err(unknown_unit::<D>(unit));
        }
        if !value.is_finite() {
            return Err(format!("{} value must be finite", D::NAME));
        }
        Ok(Self {
            value,
            unit: unit.to_string(),
            _dim: PhantomData,
        })
    }

    /// Quantity in the SI base unit.
    pub fn si(value: f64) -> Self {
        Self::new(value, D::UNITS[0].0).expect("first unit is the SI unit")
    }

    pub fn to_si(&self) -> f64 {
        self.value * D::factor(&self.unit).expect("unit checked on construction")
    }

    /// Parses `"<number><unit>"`, for example `-20mm` or `45deg`.
    pub fn parse_compact(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let split = (1..=s.len())
            .rev()
            .filter(|&i| s.is_char_boundary(i))
            .find(|&i| s[..i].parse::<f64>().is_ok() && !s[..i].ends_with(['e', 'E']))
            .unwrap_or(0);
        let (num, unit) = s.split_at(split);
        if unit.is_empty() {
            return Err(format!("`{s}` has no unit; {} needs one of {}", D::NAME, unit_list::<D>()));
        }
        let value: f64 = num
            .parse()
            .map_err(|_| format!("`{s}` does not start with a number"))?;
        Self::new(value, unit.trim())
    }
}

fn unit_list<D: Dimension>() -> String {
    D::UNITS
        .iter()
        .map(|(u, _)| format!("`{u}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn unknown_unit<D: Dimension>(unit: &str) -> String {
    format!("unit `{unit}` is not a {} unit (expected one of {})", D::NAME, unit_list::<D>())
}

impl<D: Dimension> Serialize for Quantity<D> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Quantity", 2)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("unit", &self.unit)?;
        st.end()
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        // checked field by field so the parser reports the position of the offending entry
        struct QuantityVisitor<D>(PhantomData<D>);

        impl<'de, D: Dimension> de::Visitor<'de> for QuantityVisitor<D> {
            type Value = Quantity<D>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a {} as {{\"value\": <number>, \"unit\": <string>}}", D::NAME)
            }

            fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let (mut value, mut unit) = (None::<f64>, None::<String>);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "value" if value.is_none() => {
                            let v: f64 = map.next_value()?;
                            if !v.is_finite() {
                                return Err(de::Error::custom(format!("{} value must be finite", D::NAME)));
                            }
                            value = Some(v);
                        }
                        "unit" if unit.is_none() => {
                            let u: String = map.next_value()?;
                            if D::factor(&u).is_none() {
                                return Err(de::Error::custom(unknown_unit::<D>(&u)));
                            }
                            unit = Some(u);
                        }
                        "value" | "unit" => return Err(de::Error::duplicate_field("value or unit")),
                        other => return Err(de::Error::unknown_field(other, &["value", "unit"])),
                    }
                }
                let value = value.ok_or_else(|| de::Error::missing_field("value"))?;
                let unit = unit.ok_or_else(|| {
                    de::Error::custom(format!(
                        "missing field `unit`; a {} needs one of {}",
                        D::NAME,
                        unit_list::<D>()
                    ))
                })?;
                Quantity::new(value, &unit).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(QuantityVisitor(PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_to_si() {
        assert!((Quantity::<Speed>::new(40.0, "m/min").unwrap().to_si() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(Quantity::<Length>::new(30.0, "mm").unwrap().to_si(), 0.03);
        assert!((Quantity::<Angle>::new(45.0, "deg").unwrap().to_si() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(Quantity::<Inductance>::new(8.5, "mH").unwrap().to_si(), 8.5e-3);
    }

    #[test]
    fn rejects_foreign_units() {
        assert!(Quantity::<Length>::new(1.0, "deg").is_err());
        assert!(Quantity::<Length>::new(f64::NAN, "m").is_err());
        let err = serde_json::from_str::<Quantity<Mass>>("{\n \"value\": 1,\n \"unit\": \"mm\"\n}")
            .unwrap_err();
        assert_eq!(err.line(), 4);
        assert!(err.to_string().contains("not a mass unit"));
        assert!(serde_json::from_str::<Quantity<Mass>>(r#"{"value": 1}"#).is_err());
    }

    #[test]
    fn compact_form() {
        let q = Quantity::<Length>::parse_compact("-20mm").unwrap();
        assert_eq!((q.value, q.unit.as_str()), (-20.0, "mm"));
        assert_eq!(Quantity::<Angle>::parse_compact("45deg").unwrap().value, 45.0);
        assert_eq!(Quantity::<Length>::parse_compact("1.5e-2m").unwrap().to_si(), 0.015);
        assert!(Quantity::<Length>::parse_compact("20").is_err());
        assert!(Quantity::<Length>::parse_compact("mm").is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let q = Quantity::<Torque>::new(1.274, "N*m").unwrap();
        let back: Quantity<Torque> = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(q, back);
    }
}
