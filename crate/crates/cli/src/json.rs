use bsscl::bs_words::{Chain, GroupParams};
use bsscl::Rational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

fn int(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn rational(r: &Rational) -> Value {
    json!({ "num": int(r.numer()), "den": int(r.denom()) })
}

pub fn group(p: &GroupParams) -> Value {
    json!({ "M": p.big_m, "L": p.big_l, "d": p.d, "m": p.m, "l": p.l })
}

pub fn dropped(chain: &Chain) -> Value {
    Value::Array(
        chain
            .dropped_elliptic
            .iter()
            .map(|e| json!({ "coeff": e.coeff.to_string(), "power": e.power, "term": e.to_string() }))
            .collect(),
    )
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
