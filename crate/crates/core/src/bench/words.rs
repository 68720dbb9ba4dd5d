//! Built-in word pools for the synthetic corpus. Fixed: changing them changes every
//! generated byte.

const BUSINESS_WORDS: &str = "\
    account accounts accrual acquisition acquisitions action actions adjustment \
    administration advance advertising advice advisor affiliate agenda agency agent \
    agreement allocation allowance amendment amount analysis analyst annual applicant \
    application appointment appraisal approval arbitration arrangement asset assets \
    assignment assistant associate assurance attendance attorney auction audit auditor \
    authority authorization availability average award background balance bank banking \
    bankruptcy bargain barter benchmark beneficiary benefit benefits bid bidder billing \
    bonus booking bookkeeping borrower borrowing boss boycott branch brand brands brief \
    broker brokerage budget budgets business buyer buyers campaign candidate capacity \
    capital career cargo cartel cash cashflow catalog category ceiling certificate chairman \
    channel charge charter checkout claim claims client clients closing coalition collateral \
    colleague collection commerce commission commitment committee commodity company \
    compensation competitor complaint compliance concession conference consensus consignment \
    consultant consumer contract contractor contribution corporation cost costs counsel \
    counterparty coupon courier coverage credit creditor currency customer customers \
    dashboard deadline deal dealer debit debt debtor decision deduction default deficit \
    delegate delivery demand department deposit depreciation deputy director disbursement \
    discount dispatch dispute distribution distributor dividend division donation downturn \
    draft due duty earnings economy efficiency employee employer employment endorsement \
    enterprise entrepreneur equity estate estimate evaluation exchange executive expansion \
    expenditure expense expenses export facility factory fee feedback finance financing firm \
    fiscal forecast franchise freight fund funding gain goal goods governance grant growth \
    guarantee guidance headcount headquarters hiring holding holiday import incentive income \
    increment indemnity industry inflation initiative insurance interest interview inventory \
    investment investor invoice invoices itinerary job journal labor landlord lease ledger \
    lender lending liability license liquidity loan logistics loss losses loyalty management \
    manager mandate manufacturer margin market marketing markup meeting memo merchandise \
    merchant merger milestone minutes mortgage negotiation network nominee notice objective \
    obligation offer office officer onboarding operations opportunity option order orders \
    organization outlook output outsourcing overhead owner ownership package packaging \
    partner partnership patent payable payment payments payroll penalty pension performance \
    permit personnel pipeline pitch plan planning pledge policy portfolio position premium \
    presentation price pricing principal priority procurement product production \
    productivity profit profitability program project promotion proposal prospect provision \
    purchase purchasing quarter quota quotation rebate receipt receivable recession \
    recruitment refund region registration regulation reimbursement relationship remittance \
    rent renewal report reporting representative reputation requisition reserve resignation \
    resource retail retailer retention retirement return revenue review risk royalty salary \
    sale sales savings schedule sector securities settlement shareholder shares shipment \
    shipping shortfall signature sponsor staff stakeholder standard statement stock stocks \
    strategy subscription subsidiary subsidy supervisor supplier supply surplus survey \
    takeover target tariff tax taxation team tender tenure term territory threshold ticket \
    trade trademark trading training transaction transfer treasury trend trust turnover \
    underwriter union upgrade valuation value vendor venture voucher wage wages warehouse \
    warranty wholesale workforce workload yield accountant acumen affiliation aggregate \
    appreciation arrears backlog ballot bankroll bearer bequest bondholder bottomline bursar \
    buyout capex cashier clearance clerk cofounder commercial concierge conglomerate copay \
    courtesy custodian debenture deferral delinquency demurrage deregulation diligence \
    discretion dormant downsizing earmark embargo escrow excise expatriate fiduciary \
    forfeiture frontline fulfillment garnish gross handover hedge hierarchy incorporation \
    inheritance insolvency installment intern keynote kickoff leverage levy lien liquidation \
    lobby mediation mentor microloan monopoly netting notary oligopoly";

const TECHNICAL_WORDS: &str = "\
    abstraction accelerator adapter address algorithm allocator amplifier analytics antenna \
    api appliance architecture archive array assembler attribute authentication backend \
    backup bandwidth barcode baseline batch benchmarking binary biometric bit bitrate \
    blockchain bluetooth boolean bootloader bootstrap bottleneck breakpoint broadband \
    browser buffer bug build bus byte cable cache calibration capacitor chassis checksum \
    chip chipset cipher circuit classifier cli clock cloud cluster codec compiler component \
    compression compute concurrency configuration connector console container controller \
    converter cookie core coroutine cpu crawler cryptography cursor cybersecurity daemon \
    database dataset datagram deadlock debugger decoder decryption deployment descriptor \
    diagnostic diode directory disk dispatcher docker domain download driver dynamo encoder \
    encryption endpoint engine entropy ethernet event exception executable extension \
    failover fiber field filesystem firewall firmware flag flash floppy framework frequency \
    frontend function gateway generator gigabit gpu gradient graph grid handler handshake \
    hardware hash hashing header heap heuristic hexadecimal host hostname hotfix hub \
    hypervisor identifier image immutable index inference instance instruction integer \
    integration interface interpreter interrupt iteration java kernel keyboard keystore \
    lambda laptop latency layer library linker linux load loader localhost lock logger logic \
    loop mainframe malware manifest matrix megabyte memory mesh metadata method metric \
    microcontroller microservice middleware migration mirror modem module monitor \
    motherboard multicast mutex namespace netmask neural node notebook object opcode operand \
    optimizer orchestration oscillator overflow packet pagination parameter parser partition \
    password patch payload peripheral pixel platform plugin pointer polling port processor \
    profiler protocol prototype query queue radio raid ram random recursion refactor \
    register regression relay renderer replica replication repository request resistor \
    resolver response restart router routine runtime sandbox satellite scalability scheduler \
    schema script sdk semaphore sensor serializer server serverless session shader shell \
    signal simulation snapshot socket software solver source spreadsheet sql stack storage \
    stream string subnet subroutine switch synchronization syntax telemetry template tensor \
    terminal thread throughput timeout timestamp token toolchain topology tracing transistor \
    transmitter tree trigger tuple unicode upload uptime usb utility validation variable \
    vector version virtualization voltage vulnerability webhook websocket widget wifi \
    wireless workflow workstation xml yaml accumulator actuator aggregator alias anomaly \
    antivirus applet arithmetic assertion asynchronous autoscaler backplane backpressure \
    barrier bitmask bitmap bytecode callback canary caret checkpoint chunk ciphertext \
    codebase collector collision commit compaction compositor conduit constructor \
    coprocessor crossbar cryptographic dataflow debounce decompiler dedupe defragment \
    dependency dereference deserializer devops downlink emulator enumerator epoch evictor \
    fanout fetcher fork fragment garbage getter glitch hotplug idempotent inode installer \
    integrator iterator jitter journaling keypair lattice leaderboard lexer linter listener \
    lockfile lookup macro marshaller memtable microkernel mnemonic multiplexer mutation \
    netcode nibble nonce octet offset overclock pagefile parity plaintext preemption \
    prefetch primitive quantizer rasterizer readme rebase reconciler reducer refcount regex \
    rerouting resharding rollback rootkit sampler scanner segfault selector sharding sidecar \
    signer skiplist spinlock spooler subscriber superblock syscall tarball tenancy \
    tesselation throttle tokenizer traceroute transcoder trie truncation typedef underflow \
    uplink upstream vcpu verifier vfs watchdog wavelet whitelist wildcard wrapper zipfile \
    zookeeper ajax alu amperage bandpass baud bitstream blade bytestream capacitance carrier \
    cathode cdn chipboard circuitry codepage coaxial cronjob dataloader decibel \
    demultiplexer dns dongle ebpf eeprom fpga gigahertz hotspot inductor ipv6 jumper kubelet \
    lidar loopback microchip nanosecond netlist photonics pinout raster rfid solder spectrum \
    sysadmin teraflop ttl uefi vram watt";

/// Nouns used in generated entity codes (`UNIQUE_<WORD>_CODE_<AAA>_<NNN>`).
pub const ENTITY_WORDS: &[&str] = &[
    "INVOICE", "ORDER", "LEDGER", "CONTRACT", "SHIPMENT", "TICKET", "VOUCHER", "PERMIT", "CLAIM",
    "ASSET", "BATCH", "RECEIPT", "POLICY", "LICENSE", "PARCEL", "ACCOUNT",
];

pub fn business_words() -> Vec<&'static str> {
    BUSINESS_WORDS.split_whitespace().collect()
}

pub fn technical_words() -> Vec<&'static str> {
    TECHNICAL_WORDS.split_whitespace().collect()
}
