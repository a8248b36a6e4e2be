import copy
import json
import math

import numpy as np
import pytest

from driversa.errors import InvalidGazeError, ScenarioError
from driversa.scene import longitudinal_coordinate
from driversa.simulator import (
    GazeFixationModel,
    GazeModelParams,
    bundled_scenario_path,
    fixation_probability,
    gaze_probabilities,
    load_scenario,
    make_benchmark_scenario,
    scenario_from_dict,
    step_scenario,
)


def base_data():
    return {
        "meta": {"name": "unit", "description": "hand-built"},
        "duration": 2.0,
        "tick_rate": 30,
        "road": {"lane_width": 3.5, "drivable_lanes": [-1, -2],
                 "construction_site_s": 300.0},
        "ego": {"id": "ego", "start_s": 0.0, "phases": [
            {"from": 0.0, "to": 2.0, "lane": -2, "speed": 20.0,
             "automation": True}]},
        "traffic": [
            {"id": "v1", "type": "car", "segments": [
                {"from": 0.0, "to": 2.0, "lane": -1, "speed": 20.0,
                 "start_s": 100.0}]},
        ],
        "automation": {"takeover_request_at": 1.0, "criticality_level": 2,
                       "takeover_reason": "lane closed"},
        "gaze": {"mode": "full_attention"},
    }


def make(mutate=None):
    data = copy.deepcopy(base_data())
    if mutate:
        mutate(data)
    return scenario_from_dict(data, "<unit>")


def expect_error(mutate, *fragments):
    with pytest.raises(ScenarioError) as err:
        make(mutate)
    for fragment in fragments:
        assert fragment in str(err.value)


def test_minimal_scenario_loads():
    sc = make()
    assert sc.name == "unit"
    assert sc.dt == pytest.approx(1 / 30)
    assert sc.tick_count == 60
    assert sc.ego.phases[0].automation is True
    assert sc.traffic_spec("v1").segments[0].start_s == 100.0
    with pytest.raises(KeyError):
        sc.traffic_spec("nope")


def test_missing_key_names_the_path():
    expect_error(lambda d: d.pop("duration"), "<unit>", "missing key 'duration'")
    expect_error(lambda d: d["ego"].pop("phases"), "<unit>.ego", "'phases'")


def test_tick_rate_must_be_integer():
    expect_error(lambda d: d.update(tick_rate=29.5), "tick_rate", "integer")


def test_lane_zero_rejected():
    expect_error(lambda d: d["road"].update(drivable_lanes=[0, -1]),
                 "drivable_lanes")


def test_ego_lane_must_be_drivable():
    expect_error(lambda d: d["ego"]["phases"][0].update(lane=-3),
                 "phases[0].lane", "not drivable")


def test_phase_times_must_progress():
    expect_error(lambda d: d["ego"]["phases"][0].update(to=0.0),
                 "phases[0]", "must be after")


def test_phases_cover_duration():
    expect_error(lambda d: d["ego"]["phases"][0].update(to=1.5),
                 "cover [0, 2.0] without holes")


def test_phase_hole_rejected():
    def mutate(d):
        d["ego"]["phases"] = [
            {"from": 0.0, "to": 1.0, "lane": -2, "speed": 20.0},
            {"from": 1.2, "to": 2.0, "lane": -2, "speed": 20.0, "start_s": 24.0},
        ]
    expect_error(mutate, "hole between t=1.0 and t=1.2")


def test_segment_overlap_rejected():
    def mutate(d):
        d["traffic"][0]["segments"] = [
            {"from": 0.0, "to": 1.0, "lane": -1, "speed": 20.0, "start_s": 0.0},
            {"from": 0.5, "to": 2.0, "lane": -1, "speed": 20.0, "start_s": 0.0},
        ]
    expect_error(mutate, "segments[1]", "overlap")


def test_noncontiguous_segment_needs_start_s():
    def mutate(d):
        d["traffic"][0]["segments"] = [
            {"from": 0.0, "to": 1.0, "lane": -1, "speed": 20.0, "start_s": 0.0},
            {"from": 1.5, "to": 2.0, "lane": -1, "speed": 20.0},
        ]
    expect_error(mutate, "segments[1]", "needs start_s")


def test_duplicate_vehicle_id_rejected():
    def mutate(d):
        d["traffic"].append(copy.deepcopy(d["traffic"][0]))
    expect_error(mutate, "traffic[1]", "duplicate vehicle id 'v1'")


def test_unknown_gaze_mode_rejected():
    expect_error(lambda d: d["gaze"].update(mode="psychic"),
                 "gaze.mode", "unknown mode 'psychic'")


def test_gaze_samples_must_increase():
    def mutate(d):
        d["gaze"] = {"mode": "samples", "samples": [
            {"at": 1.0, "direction": [1, 0, 0]},
            {"at": 0.5, "direction": [1, 0, 0]},
        ]}
    expect_error(mutate, "samples[1]", "increasing time order")


def test_gaze_sample_needs_one_target_form():
    def both(d):
        d["gaze"] = {"mode": "samples", "samples": [
            {"at": 0.0, "direction": [1, 0, 0], "look_at": "v1"}]}
    expect_error(both, "exactly one of 'direction' or 'look_at'")

    def neither(d):
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.0}]}
    expect_error(neither, "exactly one of 'direction' or 'look_at'")


def test_gaze_look_at_must_reference_traffic():
    def unknown(d):
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.0, "look_at": "v9"}]}
    expect_error(unknown, "unknown vehicle reference 'v9'")

    def ego_ref(d):
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.0, "look_at": "ego"}]}
    expect_error(ego_ref, "unknown vehicle reference 'ego'")


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "nope.scenario")


def test_load_scenario_invalid_json(tmp_path):
    p = tmp_path / "broken.scenario"
    p.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(p)


def test_load_scenario_round_trip(tmp_path):
    p = tmp_path / "unit.scenario"
    p.write_text(json.dumps(base_data()))
    sc = load_scenario(p)
    assert sc.name == "unit"
    assert sc.tick_count == 60


# --- frame synthesis ---------------------------------------------------------

def test_constant_velocity_positions_are_exact():
    sc = make()
    frame = step_scenario(sc, 45)  # t = 1.5 s
    assert frame.t.sim_time == pytest.approx(1.5)
    assert longitudinal_coordinate(frame.ego.position, sc.road) == pytest.approx(30.0)
    v1 = frame.vehicle("v1")
    assert longitudinal_coordinate(v1.position, sc.road) == pytest.approx(130.0)
    assert v1.velocity[0] == pytest.approx(20.0)
    assert v1.lane == -1


def test_chained_segments_carry_position():
    def mutate(d):
        d["traffic"][0]["segments"] = [
            {"from": 0.0, "to": 1.0, "lane": -1, "speed": 10.0, "start_s": 50.0},
            {"from": 1.0, "to": 2.0, "lane": -2, "speed": 20.0},
        ]
    sc = make(mutate)
    mid = step_scenario(sc, 45)  # 0.5 s into the second segment
    v1 = mid.vehicle("v1")
    assert longitudinal_coordinate(v1.position, sc.road) == pytest.approx(70.0)
    assert v1.lane == -2
    boundary = step_scenario(sc, 30)  # exactly t = 1.0: second segment owns it
    assert boundary.vehicle("v1").lane == -2


def test_vehicle_despawns_outside_segments():
    def mutate(d):
        d["traffic"][0]["segments"] = [
            {"from": 0.0, "to": 1.0, "lane": -1, "speed": 20.0, "start_s": 0.0}]
    sc = make(mutate)
    assert [v.id for v in step_scenario(sc, 0).traffic] == ["v1"]
    assert step_scenario(sc, 45).traffic == ()


def test_tick_bounds_enforced():
    sc = make()
    with pytest.raises(ValueError):
        step_scenario(sc, -1)
    with pytest.raises(ValueError):
        step_scenario(sc, sc.tick_count)


def test_takeover_request_window_and_masking():
    sc = make()
    before = step_scenario(sc, 0)
    assert before.automation.takeover_request is False
    assert before.automation.criticality_level == 0
    assert before.automation.takeover_reason == ""
    assert before.automation.time_until_odd_boundary == 0.0
    after = step_scenario(sc, 45)
    assert after.automation.takeover_request is True
    assert after.automation.criticality_level == 2
    assert after.automation.takeover_reason == "lane closed"


def test_time_until_boundary_uses_ego_speed():
    sc = make()
    frame = step_scenario(sc, 45)  # ego at 30 m, site at 300 m, 20 m/s
    assert frame.automation.time_until_odd_boundary == pytest.approx(13.5)


def test_takeover_request_needs_automation():
    sc = make()
    frame = step_scenario(sc, 45, automation_override=False)
    assert frame.automation.ego_automation_state is False
    assert frame.automation.takeover_request is False
    assert frame.automation.criticality_level == 0


# --- gaze --------------------------------------------------------------------

def test_fixation_probability_on_axis_is_one():
    assert fixation_probability((1, 0, 0), (0, 0, 0), (50, 0, 0)) == pytest.approx(1.0)


def test_fixation_probability_known_angle():
    target = (100 * math.cos(math.radians(2.0)), 100 * math.sin(math.radians(2.0)), 0.0)
    p = fixation_probability((1, 0, 0), (0, 0, 0), target,
                             GazeModelParams(attention_sigma_deg=2.0,
                                             tracker_accuracy_deg=0.0))
    assert p == pytest.approx(math.exp(-0.5))


def test_fixation_probability_widened_by_tracker_error():
    target = (100 * math.cos(math.radians(2.0)), 100 * math.sin(math.radians(2.0)), 0.0)
    p = fixation_probability((1, 0, 0), (0, 0, 0), target)
    sigma_sq = 2.0**2 + 0.6**2
    assert p == pytest.approx(math.exp(-4.0 / (2 * sigma_sq)))


def test_fixation_probability_rejects_zero_direction():
    with pytest.raises(InvalidGazeError):
        fixation_probability((0, 0, 0), (0, 0, 0), (1, 0, 0))


def test_fixation_probability_at_eye_position():
    assert fixation_probability((1, 0, 0), (5, 5, 0), (5, 5, 0)) == 1.0


def test_gaze_model_params_validated():
    with pytest.raises(ValueError):
        GazeModelParams(attention_sigma_deg=0.0)


def test_fixation_model_accumulates_and_resets():
    model = GazeFixationModel(dt=1 / 30)
    assert model.update({"v": 0.9}) == {"v": 33}
    assert model.update({"v": 0.9}) == {"v": 66}
    assert model.update({"v": 0.9}) == {"v": 100}
    assert model.update({"v": 0.5}) == {"v": 0}  # threshold itself resets
    assert model.update({"v": 0.9}) == {"v": 33}


def test_full_attention_mode_fixates_everything():
    sc = make()
    model = GazeFixationModel(dt=sc.dt)
    frame = step_scenario(sc, 0, fixation_model=model)
    v1 = frame.vehicle("v1")
    assert v1.fixation_probability == 1.0
    assert v1.fixation_time == 33
    assert step_scenario(sc, 1, fixation_model=model).vehicle("v1").fixation_time == 66


def test_none_mode_never_fixates():
    sc = make(lambda d: d["gaze"].update(mode="none"))
    frame = step_scenario(sc, 10)
    assert frame.vehicle("v1").fixation_probability == 0.0


def test_sample_mode_holds_until_next_sample():
    def mutate(d):
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.5, "look_at": "v1"}]}
    sc = make(mutate)
    assert step_scenario(sc, 0).vehicle("v1").fixation_probability == 0.0
    assert step_scenario(sc, 30).vehicle("v1").fixation_probability == pytest.approx(1.0)


def test_look_at_tracks_the_target():
    def mutate(d):
        d["traffic"].append({"id": "v2", "type": "car", "segments": [
            {"from": 0.0, "to": 2.0, "lane": -2, "speed": 0.0, "start_s": -80.0}]})
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.0, "look_at": "v1"}]}
    sc = make(mutate)
    frame = step_scenario(sc, 30)
    assert frame.vehicle("v1").fixation_probability == pytest.approx(1.0)
    assert frame.vehicle("v2").fixation_probability < 0.01


def test_look_at_despawned_target_sees_nothing():
    def mutate(d):
        d["traffic"][0]["segments"][0]["to"] = 1.0
        d["traffic"].append({"id": "v2", "type": "car", "segments": [
            {"from": 0.0, "to": 2.0, "lane": -2, "speed": 20.0, "start_s": 30.0}]})
        d["gaze"] = {"mode": "samples", "samples": [{"at": 0.0, "look_at": "v1"}]}
    sc = make(mutate)
    frame = step_scenario(sc, 45)
    assert frame.vehicle("v2").fixation_probability == 0.0


def test_interactive_mode_uses_supplied_direction():
    sc = make(lambda d: d["gaze"].update(mode="interactive"))
    idle = step_scenario(sc, 0)
    assert idle.vehicle("v1").fixation_probability == 0.0
    ego = step_scenario(sc, 0).ego.position
    toward = np.subtract(step_scenario(sc, 0).vehicle("v1").position, ego)
    steered = step_scenario(sc, 0, interactive_direction=tuple(toward))
    assert steered.vehicle("v1").fixation_probability == pytest.approx(1.0)


def test_gaze_probabilities_cover_active_vehicles_only():
    sc = make(lambda d: d["gaze"].update(mode="none"))
    probs = gaze_probabilities(sc, 0.0, (0, 0, 0), {"v1": np.zeros(3)})
    assert probs == {"v1": 0.0}


# --- canned scenarios ---------------------------------------------------------

def test_benchmark_scenario_scales():
    sc = make_benchmark_scenario(6, duration=10.0)
    assert len(sc.traffic) == 6
    assert sc.tick_count == 300
    assert sc.automation.takeover_request_at == pytest.approx(3.0)
    frame = step_scenario(sc, 0)
    assert len(frame.traffic) == 6
    assert make_benchmark_scenario(0, duration=5.0).traffic == ()
    with pytest.raises(ValueError):
        make_benchmark_scenario(-1)


def test_bundled_scenario_loads():
    sc = load_scenario(bundled_scenario_path())
    assert sc.name == "construction_site"
    assert sc.tick_count == 1800
    assert len(sc.traffic) == 4
    assert sc.road.construction_site_s == 800.0
    frame = step_scenario(sc, 0)
    assert frame.ego.current_lane == -2
