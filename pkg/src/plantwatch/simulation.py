"""Tick loop wiring the plant, PLCs, networks, historian, and detectors.

Per-tick order (deterministic, so runs are byte-for-byte repeatable):

1. attack timeline transitions (mode changes, program patches, rule swaps)
2. level-0 upstream: sensor readings and actuator status into register files
3. level-1 peer polls: remote tags into the requesting PLCs' registers
4. in-PLC detector pass over the register files
5. historian/SCADA arrival of last tick's level-1 reports, then the
   at-historian detector pass (the historian always runs one tick behind)
6. level-1 reports for this tick enter the network
7. control scans, command delivery (possibly tampered), plant step
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .attacks import AttackScenario
from .config import PlantConfig
from .control import PlcState, parse_rule, parse_rules, plc_scan, set_mode
from .detectors import Detector
from .invariants import Alarm, load_invariant_set
from .network import Channel, HistorianStore, HistorianView, Message, ScadaView, TamperHook
from .plant import initial_state, read_sensor, step_plant
from .tags import TAGS, is_actuator, is_sensor, stage_tags

PLC_IDS = (1, 2, 3, 4, 5)


class UnmappedPrimitiveError(ValueError):
    pass


@dataclass
class SimResult:
    alarms: dict                 # placement -> list[Alarm]
    historian: HistorianStore
    scada: ScadaView
    trace: list
    skips: dict                  # placement -> per-invariant skip counts
    scenario: AttackScenario | None
    ticks: int


class Simulation:
    def __init__(self, config: PlantConfig, invariant_profile: str = "v2017",
                 scenario: AttackScenario | None = None):
        self.config = config
        self.state = initial_state(config)
        self.scenario = scenario

        self.plcs = {p: PlcState(p) for p in PLC_IDS}
        self.own_sensors = {p: [t for t in stage_tags(p) if is_sensor(t)] for p in PLC_IDS}
        self.own_actuators = {p: [t for t in stage_tags(p) if is_actuator(t)] for p in PLC_IDS}
        self.rules_raw = {p: list(config.rules_raw.get(p, [])) for p in PLC_IDS}
        self.rules = {p: parse_rules(self.rules_raw[p], config.markers) for p in PLC_IDS}

        self.l0_up = {p: Channel(f"l0.up.plc{p}", 0, f"rio{p}", f"plc{p}") for p in PLC_IDS}
        self.l0_down = {p: Channel(f"l0.down.plc{p}", 0, f"plc{p}", f"rio{p}") for p in PLC_IDS}
        self.l1_hist = {p: Channel(f"l1.plc{p}.historian", 1, f"plc{p}", "historian")
                        for p in PLC_IDS}
        self.l1_scada = {p: Channel(f"l1.plc{p}.scada", 1, f"plc{p}", "scada")
                         for p in PLC_IDS}
        self.l1_peer = {}
        for requester, tags in config.remote_tags.items():
            for tag in tags:
                owner = TAGS[tag].stage
                key = (owner, requester)
                if key not in self.l1_peer:
                    self.l1_peer[key] = Channel(f"l1.plc{owner}.plc{requester}", 1,
                                                f"plc{owner}", f"plc{requester}")

        self.historian = HistorianStore()
        self.scada = ScadaView()
        invariants = load_invariant_set(invariant_profile, config)
        self.wd = Detector.at_plcs(invariants)
        self.wdh = Detector.at_historian(invariants)
        self.alarms = {"plc": [], "historian": []}
        self.trace = []

        self._pending_hist: dict = {}
        self._pending_scada: dict = {}
        self._scada_expected = 0
        self._stateful = []      # primitives needing per-tick transitions
        self._net_overrides = []
        if scenario is not None:
            for primitive in scenario.timeline:
                self._install(primitive)

    # -- attack primitive installation ---------------------------------

    def _install(self, prim) -> None:
        window = (prim.start, prim.end)
        kind, params = prim.kind, prim.params
        if kind in ("sensor_spoof_constant", "l0_mitm_rewrite"):
            stage = TAGS[params["tag"]].stage
            self.l0_up[stage].install(TamperHook("rewrite", window, params["tag"],
                                                 params["value"]))
        elif kind == "sensor_offset":
            stage = TAGS[params["tag"]].stage
            self.l0_up[stage].install(TamperHook("offset", window, params["tag"],
                                                 params["delta"]))
        elif kind == "l1_mitm_rewrite":
            owner = TAGS[params["tag"]].stage
            dest = params["dest"]
            if dest == "historian":
                channel = self.l1_hist[owner]
            elif dest == "scada":
                channel = self.l1_scada[owner]
            elif dest.startswith("plc"):
                channel = self.l1_peer[(owner, int(dest[3:]))]
            else:
                raise UnmappedPrimitiveError(f"l1_mitm_rewrite dest {dest!r}")
            channel.install(TamperHook("rewrite", window, params["tag"], params["value"]))
        elif kind == "drop_traffic_to":
            dest, plc = params["dest"], int(params["plc"])
            channel = {"historian": self.l1_hist, "scada": self.l1_scada}[dest][plc]
            channel.install(TamperHook("drop", window))
        elif kind == "syn_flood_plc":
            plc = int(params["plc"])
            flooded = [self.l1_hist[plc], self.l1_scada[plc]]
            flooded += [ch for (owner, _), ch in self.l1_peer.items() if owner == plc]
            for channel in flooded:
                channel.install(TamperHook("disconnect", window))
        elif kind in ("rio_disconnect", "manual_cable_disconnect"):
            plc = int(params["plc"])
            self.l0_up[plc].install(TamperHook("disconnect", window))
            self.l0_down[plc].install(TamperHook("disconnect", window))
        elif kind == "historian_tamper":
            self.historian.add_mutation(window, params["tag"], params["value"])
        elif kind == "actuator_override_net":
            self._net_overrides.append(prim)
        elif kind in ("actuator_override_hmi", "dosing_override", "actuator_flicker_hmi",
                      "plc_reprogram_pin", "setpoint_change"):
            self._stateful.append(prim)
        else:
            raise UnmappedPrimitiveError(kind)

    def _timeline_tick(self, tick: int) -> None:
        for prim in self._stateful:
            kind, params = prim.kind, prim.params
            plc = self.plcs[int(params["plc"])]
            if kind in ("actuator_override_hmi", "dosing_override"):
                if tick == prim.start:
                    set_mode(plc, "Manual", params["overrides"])
                elif tick == prim.end + 1:
                    set_mode(plc, "Auto")
            elif kind == "actuator_flicker_hmi":
                if prim.start <= tick <= prim.end:
                    phase = ((tick - prim.start) // int(params.get("period", 1))) % 2
                    position = params.get("positions", ["On", "Off"])[phase]
                    set_mode(plc, "Manual", {params["tag"]: position})
                elif tick == prim.end + 1:
                    set_mode(plc, "Auto")
            elif kind == "plc_reprogram_pin":
                if tick == prim.start:
                    plc.program_patches.update(params["pins"])
                elif tick == prim.end + 1:
                    for tag in params["pins"]:
                        plc.program_patches.pop(tag, None)
            elif kind == "setpoint_change":
                if tick == prim.start:
                    index = self.rules_raw[plc.plc_id].index(params["old"])
                    self.rules[plc.plc_id][index] = parse_rule(params["new"],
                                                               self.config.markers)
                elif tick == prim.end + 1:
                    index = self.rules_raw[plc.plc_id].index(params["old"])
                    self.rules[plc.plc_id][index] = parse_rule(params["old"],
                                                               self.config.markers)

    # -- one tick ------------------------------------------------------

    def step(self) -> None:
        tick = self.state.tick
        config = self.config
        self._timeline_tick(tick)

        # level-0 upstream: field values into register files
        for p in PLC_IDS:
            channel = self.l0_up[p]
            for tag in self.own_sensors[p]:
                value = read_sensor(self.state, tag, config.noise, config.seed)
                delivered = channel.deliver(Message(tag, value, tick))
                if delivered is not None:
                    self.plcs[p].update_register(delivered.tag, delivered.value, tick)
            for tag in self.own_actuators[p]:
                delivered = channel.deliver(
                    Message(tag, self.state.actuator_value(tag), tick))
                if delivered is not None:
                    self.plcs[p].update_register(delivered.tag, delivered.value, tick)
            for delivered in channel.matured(tick):
                self.plcs[p].update_register(delivered.tag, delivered.value, tick)

        # level-1 peer polls
        for requester, tags in config.remote_tags.items():
            for tag in tags:
                owner = TAGS[tag].stage
                value = self.plcs[owner].view().get(tag)
                if value is None:
                    continue
                channel = self.l1_peer[(owner, requester)]
                delivered = channel.deliver(Message(tag, value, tick))
                if delivered is not None:
                    self.plcs[requester].update_register(delivered.tag, delivered.value,
                                                         tick)
                for delivered in channel.matured(tick):
                    self.plcs[requester].update_register(delivered.tag, delivered.value,
                                                         tick)

        # in-PLC detector pass
        views = {p: self.plcs[p].view() for p in PLC_IDS}
        self.alarms["plc"].extend(self.wd.evaluate(tick, views))

        # historian/SCADA arrival (sent last tick), then at-historian pass
        if self._pending_hist:
            self.historian.append(tick, self._pending_hist)
        self.scada.update(tick, self._pending_scada, self._scada_expected)
        hview = HistorianView(self.historian)
        self.alarms["historian"].extend(
            self.wdh.evaluate(tick, {p: hview for p in PLC_IDS}))

        # level-1 reports for this tick enter the network
        self._pending_hist = {}
        self._pending_scada = {}
        self._scada_expected = 0
        for p in PLC_IDS:
            view = self.plcs[p].view()
            for tag in stage_tags(p):
                value = view.get(tag)
                if value is None:
                    continue
                self._scada_expected += 1
                delivered = self.l1_hist[p].deliver(Message(tag, value, tick))
                if delivered is not None:
                    self._pending_hist[delivered.tag] = delivered.value
                delivered = self.l1_scada[p].deliver(Message(tag, value, tick))
                if delivered is not None:
                    self._pending_scada[delivered.tag] = delivered.value

        # control scans and command delivery
        commands: dict = {}
        for p in PLC_IDS:
            for tag, position in plc_scan(self.plcs[p], self.rules[p]).items():
                delivered = self.l0_down[p].deliver(Message(tag, position, tick))
                if delivered is not None:
                    commands[delivered.tag] = delivered.value
        for prim in self._net_overrides:
            if prim.start <= tick <= prim.end:
                commands.update(prim.params["commands"])

        self.trace.append({
            "tick": tick,
            "level": dict(self.state.level),
            "flow": dict(self.state.flow),
            "dp": self.state.dp,
            "ph": dict(self.state.ph),
            "actuator": {tag: pos.value for tag, pos in self.state.actuator.items()},
        })
        self.state = step_plant(self.state, commands, config)

    def run(self, ticks: int) -> SimResult:
        for _ in range(ticks):
            self.step()
        return SimResult(
            alarms=self.alarms,
            historian=self.historian,
            scada=self.scada,
            trace=self.trace,
            skips={"plc": dict(self.wd.skips), "historian": dict(self.wdh.skips)},
            scenario=self.scenario,
            ticks=ticks,
        )
