//! Raw state dump for debugging.
//!
//! Layout: the 4 bytes `SVEC`, the qubit count as a little-endian `u32`, 8 reserved zero bytes,
//! then `2^n` amplitudes as interleaved little-endian `f64` pairs `(re, im)`.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use super::{SimError, StateVector};

const MAGIC: &[u8; 4] = b"SVEC";

pub fn write_state<W: Write>(state: &StateVector, mut w: W) -> std::io::Result<()> {
    let mut header = [0u8; 16];
    header[..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&(state.n() as u32).to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(16 * 4096);
    for chunk in state.amplitudes().chunks(4096) {
        buf.clear();
        for a in chunk {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_state<R: Read>(mut r: R, max_qubits: usize) -> Result<StateVector, SimError> {
    let io = |e: std::io::Error| SimError::Dump(e.to_string());
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(io)?;
    if &header[..4] != MAGIC {
        return Err(SimError::Dump("missing SVEC magic".into()));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    if n == 0 || n > max_qubits {
        return Err(SimError::Dump(format!("qubit count {n} outside 1..={max_qubits}")));
    }
    let mut amps = Vec::with_capacity(1usize << n);
    let mut pair = [0u8; 16];
    for _ in 0..1usize << n {
        r.read_exact(&mut pair).map_err(io)?;
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        amps.push(C64::new(re, im));
    }
    StateVector::from_amplitudes(amps)
}
