//! Binary statevector snapshots.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes | content                                    |
//! |-------|--------------------------------------------|
//! | 4     | magic `QWSV`                               |
//! | 4     | format version, `u32` = 1                  |
//! | 4     | number of parameters `P`, `u32`            |
//! | 4*P   | qubits per parameter, `u32` each           |
//! | 4     | ancilla qubits `a`, `u32`                  |
//! | 8     | amplitude count `2^total`, `u64`           |
//! | 16*n  | `(re, im)` pairs of `f64`                  |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::layout::RegisterLayout;
use super::state::WalkState;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QWSV";
const VERSION: u32 = 1;

pub fn write_statevector<W: Write>(state: &WalkState, mut w: W) -> Result<()> {
    let layout = state.layout();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(layout.num_params() as u32).to_le_bytes())?;
    for &q in layout.param_qubits() {
        w.write_all(&(q as u32).to_le_bytes())?;
    }
    w.write_all(&(layout.ancilla_qubits() as u32).to_le_bytes())?;
    w.write_all(&(state.amplitudes().len() as u64).to_le_bytes())?;
    for a in state.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_statevector<R: Read>(mut r: R, qubit_cap: usize) -> Result<WalkState> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a statevector dump".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported statevector version {version}")));
    }
    let params = read_u32(&mut r)? as usize;
    if params == 0 || params > 64 {
        return Err(Error::Format(format!("implausible parameter count {params}")));
    }
    let qubits = (0..params)
        .map(|_| read_u32(&mut r).map(|q| q as usize))
        .collect::<Result<Vec<_>>>()?;
    let ancilla = read_u32(&mut r)? as usize;
    let layout = RegisterLayout::new(&qubits, ancilla)?;
    layout.check_cap(qubit_cap)?;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let n = u64::from_le_bytes(b) as usize;
    if n != layout.dimension() {
        return Err(Error::Format(format!("amplitude count {n} does not match layout")));
    }
    let amps = (0..n)
        .map(|_| Ok(Complex64::new(read_f64(&mut r)?, read_f64(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    WalkState::from_amplitudes(layout, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let layout = RegisterLayout::new(&[2, 1], 2).unwrap();
        let mut st = WalkState::init(layout, 26).unwrap();
        st.apply_v();
        let mut buf = Vec::new();
        write_statevector(&st, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"QWSV");
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 4 + 8 + 16 * st.amplitudes().len());
        let back = read_statevector(buf.as_slice(), 26).unwrap();
        assert_eq!(back, st);
        assert!(read_statevector(&buf[..buf.len() - 1], 26).is_err());
        assert!(read_statevector(&b"XXXX"[..], 26).is_err());
    }
}
