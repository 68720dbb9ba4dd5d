//! Counted region writes with an optional fault-injection hook.

use rusqlite::{Connection, Params};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultAction {
    /// Fail the transaction with [`Error::InjectedFault`]; it is rolled back.
    Error,
    /// Kill the process on the spot, leaving recovery to the next open.
    Abort,
}

/// Fire once `after_writes` region writes have happened in a transaction.
/// The commit itself is the last boundary, so `after_writes` equal to the
/// transaction's write count faults just before it becomes durable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaultPlan {
    pub after_writes: usize,
    pub action: FaultAction,
}

#[derive(Debug, Default)]
pub(crate) struct FaultState {
    plan: Option<FaultPlan>,
    writes: usize,
}

impl FaultState {
    pub(crate) fn new(plan: Option<FaultPlan>) -> Self {
        FaultState { plan, writes: 0 }
    }

    pub(crate) fn reset(&mut self) {
        self.writes = 0;
    }

    fn boundary(&mut self) -> Result<()> {
        if let Some(plan) = self.plan {
            if plan.after_writes == self.writes {
                match plan.action {
                    FaultAction::Error => return Err(Error::InjectedFault(self.writes)),
                    FaultAction::Abort => std::process::abort(),
                }
            }
        }
        self.writes += 1;
        Ok(())
    }
}

/// All mutations inside a commit go through here.
pub(crate) struct RegionWriter<'a> {
    conn: &'a Connection,
    faults: &'a mut FaultState,
}

impl<'a> RegionWriter<'a> {
    pub(crate) fn new(conn: &'a Connection, faults: &'a mut FaultState) -> Self {
        RegionWriter { conn, faults }
    }

    pub(crate) fn conn(&self) -> &'a Connection {
        self.conn
    }

    pub(crate) fn execute<P: Params>(&mut self, sql: &str, params: P) -> Result<usize> {
        self.faults.boundary()?;
        Ok(self.conn.prepare_cached(sql)?.execute(params)?)
    }

    /// Executes an insert and returns the new rowid.
    pub(crate) fn insert<P: Params>(&mut self, sql: &str, params: P) -> Result<i64> {
        self.faults.boundary()?;
        self.conn.prepare_cached(sql)?.execute(params)?;
        Ok(self.conn.last_insert_rowid())
    }

    pub(crate) fn before_commit(&mut self) -> Result<()> {
        self.faults.boundary()
    }
}
