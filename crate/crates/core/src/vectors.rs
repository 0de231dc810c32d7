//! Frozen reference vectors.
//!
//! `vectors/primitives.txt` holds lines `<op> <hex-inputs...> -> <hex-output>`
//! (`-` stands for an empty input). Every line can be re-evaluated with
//! [`eval`]; the file is only rewritten by `bpk-rzk freeze-vectors`.

use crate::circuit::gadgets::permutation_gate_count;
use crate::commitments::{com0_commit, com1_commit, naor_commit_bit, CommitmentKey};
use crate::primitives::{hash_eval, owf_eval, prf_eval, prg_expand, Bits, GroupParams, HashIndex, PrfKey};
use crate::rszk::{toy_lambda, TOY_N};

fn unhex(s: &str) -> Result<Vec<u8>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    hex::decode(s).map_err(|e| format!("bad hex `{s}`: {e}"))
}

fn num(s: &str) -> Result<u64, String> {
    u64::from_str_radix(s, 16).map_err(|e| format!("bad number `{s}`: {e}"))
}

/// Evaluates one vector operation on hex inputs.
pub fn eval(op: &str, inputs: &[&str]) -> Result<String, String> {
    let out = eval_raw(op, inputs)?;
    Ok(if out.is_empty() { "-".into() } else { out })
}

fn eval_raw(op: &str, inputs: &[&str]) -> Result<String, String> {
    let want = |n: usize| if inputs.len() == n { Ok(()) } else { Err(format!("{op} takes {n} inputs")) };
    let group = |i: usize| -> Result<GroupParams, String> {
        GroupParams::from_parts(num(inputs[i])?, num(inputs[i + 1])?, num(inputs[i + 2])?).map_err(|e| e.to_string())
    };
    match op {
        "owf_eval" => {
            want(4)?;
            let g = group(0)?;
            Ok(format!("{:x}", owf_eval(&g, num(inputs[3])?).map_err(|e| e.to_string())?.value()))
        }
        "prg_expand" => {
            want(2)?;
            Ok(prg_expand(&unhex(inputs[0])?, num(inputs[1])? as usize).to_hex())
        }
        "hash_eval" => {
            want(3)?;
            let h = HashIndex::new(num(inputs[0])? as u32, num(inputs[1])? as u16);
            Ok(hash_eval(h, &unhex(inputs[2])?).to_hex())
        }
        "prf_eval" => {
            want(2)?;
            Ok(prf_eval(&PrfKey::new(unhex(inputs[0])?), &unhex(inputs[1])?).to_hex())
        }
        "naor_commit_bit" => {
            want(4)?;
            let rc_bytes = unhex(inputs[0])?;
            let rc = Bits::from_bytes(&rc_bytes, num(inputs[1])? as usize);
            Ok(naor_commit_bit(&rc, num(inputs[2])? != 0, &unhex(inputs[3])?).to_hex())
        }
        "com0_commit" | "com1_commit" => {
            want(6)?;
            let g = group(0)?;
            let h = g.element(num(inputs[3])?).map_err(|e| e.to_string())?;
            let key = CommitmentKey::with_h(g, h);
            let (m, r) = (num(inputs[4])?, num(inputs[5])?);
            if op == "com0_commit" {
                let c = com0_commit(&key, m, r).map_err(|e| e.to_string())?;
                Ok(format!("{:x} {:x}", c.u.value(), c.v.value()))
            } else {
                Ok(format!("{:x}", com1_commit(&key, m, r).map_err(|e| e.to_string())?.c.value()))
            }
        }
        _ => Err(format!("unknown op `{op}`")),
    }
}

/// Splits a vector line into `(op, inputs, output)`.
pub fn parse_line(line: &str) -> Option<(&str, Vec<&str>, &str)> {
    let (lhs, out) = line.split_once(" -> ")?;
    let mut parts = lhs.split_whitespace();
    let op = parts.next()?;
    Some((op, parts.collect(), out.trim()))
}

/// The input side of every frozen primitive vector.
fn cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let rc = prg_expand(&[0xff], 3 * TOY_N);
    let h = |x: HashIndex| vec![format!("{:x}", x.iv), format!("{:x}", x.out_bits)];
    let mut out = vec![
        ("owf_eval", s(&["17", "b", "2", "3"])),
        ("owf_eval", s(&["17", "b", "2", "0"])),
        ("prg_expand", s(&["00", "18"])),
        ("prg_expand", s(&["0000", "30"])),
        ("prg_expand", s(&["00", "0"])),
    ];
    for (n, data) in [(8u16, "-"), (16, "-"), (64, "-"), (16, "616263")] {
        let mut v = h(HashIndex::new(0, n));
        v.push(data.into());
        out.push(("hash_eval", v));
    }
    let mut v = h(HashIndex::TO_GROUP);
    v.push("-".into());
    out.push(("hash_eval", v));
    out.extend([
        ("prf_eval", s(&["0000", "-"])),
        ("prf_eval", s(&["0102", "616263"])),
        ("prf_eval", s(&["000102030405060708090a0b0c0d0e0f", "00"])),
        ("naor_commit_bit", vec![rc.to_hex(), "18".into(), "1".into(), "00".into()]),
        ("naor_commit_bit", vec![rc.to_hex(), "18".into(), "0".into(), "00".into()]),
        ("com0_commit", s(&["17", "b", "2", "9", "3", "2"])),
        ("com1_commit", s(&["17", "b", "2", "9", "3", "2"])),
        ("com1_commit", s(&["17", "b", "2", "9", "0", "0"])),
    ]);
    out
}

pub fn primitives_text() -> String {
    let mut text = String::new();
    for (op, inputs) in cases() {
        let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        let got = eval(op, &refs).expect("frozen cases are well-formed");
        text.push_str(&format!("{op} {} -> {got}\n", inputs.join(" ")));
    }
    text
}

pub fn gate_budget_text() -> String {
    let l = toy_lambda();
    format!(
        "lambda n={} B={} T={} gates={}\npermutation gates={}\n",
        l.n,
        l.bounds.max_instructions,
        l.bounds.max_steps,
        l.circuit.gates.len(),
        permutation_gate_count()
    )
}
