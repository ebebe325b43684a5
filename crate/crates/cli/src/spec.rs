//! Problem descriptions, either from flags or from a JSON file.

use serde::{Deserialize, Deserializer, Serialize};

/// Everything a command may consume. Only the fields a command needs may be
/// present; see [`ProblemSpec::check_fields`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric_function: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

/// An ideal as `"x^2, y^3"` or `["x^2", "y^3"]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdealText {
    Joined(String),
    List(Vec<String>),
}

impl IdealText {
    pub fn source(&self) -> String {
        match self {
            IdealText::Joined(s) => s.clone(),
            IdealText::List(v) if v.is_empty() => "0".into(),
            IdealText::List(v) => v.join(", "),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub c_max: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub shift: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, deserialize_with = "text", skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

impl Options {
    fn is_empty(&self) -> bool {
        self == &Options::default()
    }

    fn merge(self, base: Options) -> Options {
        Options {
            c_max: self.c_max.or(base.c_max),
            monomial: self.monomial.or(base.monomial),
            beta: self.beta.or(base.beta),
            k: self.k.or(base.k),
            alpha: self.alpha.or(base.alpha),
            mode: self.mode.or(base.mode),
            shift: self.shift.or(base.shift),
            epsilon: self.epsilon.or(base.epsilon),
            weight: self.weight.or(base.weight),
            schedule: self.schedule.or(base.schedule),
            points: self.points.or(base.points),
            samples: self.samples.or(base.samples),
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("c_max", self.c_max.is_some()),
            ("monomial", self.monomial.is_some()),
            ("beta", self.beta.is_some()),
            ("k", self.k.is_some()),
            ("alpha", self.alpha.is_some()),
            ("mode", self.mode.is_some()),
            ("shift", self.shift.is_some()),
            ("epsilon", self.epsilon.is_some()),
            ("weight", self.weight.is_some()),
            ("schedule", self.schedule.is_some()),
            ("points", self.points.is_some()),
            ("samples", self.samples.is_some()),
        ];
        for (name, on) in flags {
            if on {
                out.push(name);
            }
        }
        out
    }
}

/// Accepts `"5/6"` or a bare JSON number for rational-valued fields, and a
/// JSON array for list-valued ones.
fn text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Num(serde_json::Number),
        List(Vec<Raw>),
    }
    fn flatten(r: Raw) -> String {
        match r {
            Raw::Str(s) => s,
            Raw::Num(n) => n.to_string(),
            Raw::List(v) => v.into_iter().map(flatten).collect::<Vec<_>>().join(","),
        }
    }
    Ok(Option::<Raw>::deserialize(d)?.map(flatten))
}

impl ProblemSpec {
    /// Fields in `self` win over those in `base`.
    pub fn merge(self, base: ProblemSpec) -> ProblemSpec {
        ProblemSpec {
            command: self.command.or(base.command),
            variables: if self.variables.is_empty() { base.variables } else { self.variables },
            ideal: self.ideal.or(base.ideal),
            toric_function: self.toric_function.or(base.toric_function),
            c: self.c.or(base.c),
            axis: self.axis.or(base.axis),
            options: self.options.merge(base.options),
        }
    }

    /// Rejects fields the command does not consume.
    pub fn check_fields(&self, command: &str, allowed: &[&str]) -> Result<(), String> {
        let mut present = Vec::new();
        if self.ideal.is_some() {
            present.push("ideal");
        }
        if self.toric_function.is_some() {
            present.push("toric_function");
        }
        if self.c.is_some() {
            present.push("c");
        }
        if self.axis.is_some() {
            present.push("axis");
        }
        present.extend(self.options.present());
        match present.iter().find(|f| !allowed.contains(f)) {
            Some(f) => Err(format!("'{f}' is not used by '{command}'")),
            None => Ok(()),
        }
    }
}
