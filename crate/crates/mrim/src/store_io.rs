//! Binary dump/load for sample stores.
//!
//! Layout, all integers little-endian:
//! `b"MRIMRR\0\0"`, `u32` version, `u8` kind (1 = sets, 2 = sequences),
//! `u64` n, `u64` rounds, `u64` samples, `u64` covered_external, then per
//! sample the `u32` root followed by, per round, a `u32` length and the
//! `u32` member ids.

use std::io::{Read, Write};

use mrim_core::ris::{RRSequence, RRSequenceStore, RRStore};
use mrim_core::NodeId;

use crate::error::{Failure, Result};

pub const MAGIC: &[u8; 8] = b"MRIMRR\0\0";
pub const VERSION: u32 = 1;
const KIND_SETS: u8 = 1;
const KIND_SEQUENCES: u8 = 2;

#[derive(Debug, Clone)]
pub enum AnyStore {
    Sets(RRStore),
    Sequences(RRSequenceStore),
}

fn put_u32<W: Write>(w: &mut W, x: u32) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_u64<W: Write>(w: &mut W, x: u64) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_nodes<W: Write>(w: &mut W, nodes: &[NodeId]) -> Result<()> {
    put_u32(w, nodes.len() as u32)?;
    for v in nodes {
        put_u32(w, v.0)?;
    }
    Ok(())
}

fn header<W: Write>(w: &mut W, kind: u8, n: usize, rounds: usize, len: usize, external: usize) -> Result<()> {
    w.write_all(MAGIC)?;
    put_u32(w, VERSION)?;
    w.write_all(&[kind])?;
    for x in [n, rounds, len, external] {
        put_u64(w, x as u64)?;
    }
    Ok(())
}

pub fn write_store<W: Write>(w: &mut W, store: &RRStore) -> Result<()> {
    header(w, KIND_SETS, store.node_count(), 1, store.len(), store.covered_external())?;
    for (root, members) in store.samples() {
        put_u32(w, root.0)?;
        put_nodes(w, members)?;
    }
    Ok(())
}

pub fn write_sequence_store<W: Write>(w: &mut W, store: &RRSequenceStore) -> Result<()> {
    header(w, KIND_SEQUENCES, store.node_count(), store.rounds(), store.len(), 0)?;
    for s in 0..store.len() {
        put_u32(w, store.root(s).0)?;
        for t in 0..store.rounds() {
            put_nodes(w, store.round_set(s, t))?;
        }
    }
    Ok(())
}

struct Reader<R> {
    inner: R,
    n: usize,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner
            .read_exact(&mut b)
            .map_err(|e| Failure::input(format!("truncated store: {e}")))?;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn node(&mut self) -> Result<NodeId> {
        let v = self.u32()?;
        if v as usize >= self.n {
            return Err(Failure::input(format!("store node {v} out of range for n = {}", self.n)));
        }
        Ok(NodeId(v))
    }

    fn nodes(&mut self) -> Result<Vec<NodeId>> {
        let len = self.u32()? as usize;
        if len > self.n {
            return Err(Failure::input(format!("store sample of {len} nodes exceeds n = {}", self.n)));
        }
        (0..len).map(|_| self.node()).collect()
    }
}

pub fn read_store<R: Read>(r: R) -> Result<AnyStore> {
    let mut rd = Reader { inner: r, n: 0 };
    if &rd.bytes::<8>()? != MAGIC {
        return Err(Failure::input("not a sample store (bad magic)"));
    }
    let version = rd.u32()?;
    if version != VERSION {
        return Err(Failure::input(format!("unsupported store version {version}")));
    }
    let [kind] = rd.bytes::<1>()?;
    let to_usize = |x: u64| usize::try_from(x).map_err(|_| Failure::input("store header value too large"));
    let n = to_usize(rd.u64()?)?;
    let rounds = to_usize(rd.u64()?)?;
    let len = rd.u64()?;
    let external = rd.u64()?;
    rd.n = n;
    match kind {
        KIND_SETS => {
            if rounds != 1 {
                return Err(Failure::input("set store must have one round"));
            }
            let mut store = RRStore::new(n);
            for _ in 0..len {
                let root = rd.node()?;
                let members = rd.nodes()?;
                store.push(root, &members);
            }
            for _ in 0..external {
                store.add_external();
            }
            Ok(AnyStore::Sets(store))
        }
        KIND_SEQUENCES => {
            if rounds == 0 || external != 0 {
                return Err(Failure::input("malformed sequence store header"));
            }
            let mut store = RRSequenceStore::new(n, rounds);
            for _ in 0..len {
                let root = rd.node()?;
                let per_round = (0..rounds).map(|_| rd.nodes()).collect::<Result<_>>()?;
                store.push(&RRSequence { root, per_round });
            }
            Ok(AnyStore::Sequences(store))
        }
        k => Err(Failure::input(format!("unknown store kind {k}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_store_round_trip() {
        let mut s = RRStore::new(3);
        s.push(NodeId(1), &[NodeId(1), NodeId(0)]);
        s.push(NodeId(2), &[NodeId(2)]);
        s.add_external();
        let mut buf = Vec::new();
        write_store(&mut buf, &s).unwrap();
        let AnyStore::Sets(back) = read_store(&buf[..]).unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(back.samples().collect::<Vec<_>>(), s.samples().collect::<Vec<_>>());
        assert_eq!(back.covered_external(), 1);
        assert!(back.index_consistent());
    }

    #[test]
    fn rejects_corruption() {
        let mut s = RRStore::new(2);
        s.push(NodeId(0), &[NodeId(0)]);
        let mut buf = Vec::new();
        write_store(&mut buf, &s).unwrap();
        assert!(read_store(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_store(&bad[..]).is_err());
        let mut oob = buf.clone();
        let last = oob.len() - 4;
        oob[last..].copy_from_slice(&9u32.to_le_bytes());
        assert!(read_store(&oob[..]).is_err());
    }
}
