/* Copyright 2026 The comag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* comag: a solver and verification toolkit for common-agency menu games.
 *
 * The core is exact-rational C++; this header is the stable C surface. All
 * rich payloads travel as JSON strings. Objects are opaque handles released
 * with their matching _free function; strings returned through out-params are
 * released with comag_string_free. Functions return COMAG_OK on success; on
 * COMAG_VERDICT_NEGATIVE the call succeeded but the decision went against
 * the queried property (not a PBE, infeasible, check failed), and the report
 * is still written. comag_last_error() describes the most recent failure on
 * the calling thread.
 */

#ifndef COMAG_H_
#define COMAG_H_

#ifdef __cplusplus
extern "C" {
#endif

typedef enum comag_status {
  COMAG_OK = 0,
  COMAG_ERR_PARSE = 1,     /* malformed JSON or schema violation */
  COMAG_ERR_INVALID = 2,   /* semantic violation (bad probabilities, bounds) */
  COMAG_ERR_USAGE = 3,     /* null handle, unknown option, missing argument */
  COMAG_VERDICT_NEGATIVE = 4,
  COMAG_ERR_INTERNAL = 5
} comag_status;

typedef struct comag_game comag_game;
typedef struct comag_delegation_model comag_delegation_model;
typedef struct comag_bundling_model comag_bundling_model;

const char* comag_version(void);
const char* comag_last_error(void);
void comag_string_free(char* s);

/* ----- finite games ----- */

comag_status comag_game_load(const char* game_json, comag_game** out);
void comag_game_free(comag_game* game);
comag_status comag_game_serialize(const comag_game* game, char** json_out);

/* options: {"principal": id, "rivals": {id: [outcome, ...], ...},
 *           "cap": n?, "strategy": {...}?, "general": bool?} */
comag_status comag_solve_screening(const comag_game* game, const char* options_json,
                                   char** report_out);

/* options: {"rivals": {...}, "mixture": [{"rivals": {...}, "weight": "num/den"}...]?,
 *           "principal": id} */
comag_status comag_indirect_utility(const comag_game* game, const char* options_json,
                                    char** report_out);

/* variant: "upr" | "upr-i" | "upr-d" | "men"; mechanisms_json:
 * {"mechanisms": [...], "strategy": {...}?} */
comag_status comag_check_compatibility(const comag_game* game, const char* variant,
                                       const char* mechanisms_json, char** report_out);

/* profile_json: {"menus": {...}} (optional "mechanisms": [...]) */
comag_status comag_check_sufficiency(const comag_game* game, const char* profile_json,
                                     char** report_out);

/* options: {"bound": n?, "cap": n?} or {"iterate_from": {menus}, "rounds": n?} */
comag_status comag_find_equilibria(const comag_game* game, const char* options_json,
                                   char** report_out);

/* entries_json: {"entries": [{"menus": {...}, "strategy": {...}}, ...]} */
comag_status comag_pareto(const comag_game* game, const char* entries_json, char** report_out);

/* profile_json: {"menus": {...}, "strategy": {...}?, "strict": bool?} */
comag_status comag_classify(const comag_game* game, const char* profile_json, char** report_out);

/* profile_json: {"menus": {...}, "strategy": {...}?} — without a strategy the
 * call decides support feasibility first and verifies with the witness. */
comag_status comag_verify(const comag_game* game, const char* profile_json, char** report_out);

/* profile_json: {"menus": {...}, "var_bound": n?} */
comag_status comag_support(const comag_game* game, const char* profile_json, char** report_out);

/* options: {"variant": "iia-1"|"iia-2", "strategy": {...},
 *           "profiles": [{menus}, ...]} */
comag_status comag_check_iia(const comag_game* game, const char* options_json,
                             char** report_out);

/* mechanisms_json: {"mechanisms": [...]} — builds the supporting strategy. */
comag_status comag_construct_strategy(const comag_game* game, const char* mechanisms_json,
                                      char** strategy_out);

/* ----- quadratic-loss delegation ----- */

comag_status comag_delegation_load(const char* model_json, comag_delegation_model** out);
void comag_delegation_free(comag_delegation_model* model);

/* op: "check" | "build" | "xval"; spec_json is the regime spec; for xval the
 * options carry {"types": n, "outcomes": n}. */
comag_status comag_delegation_run(const comag_delegation_model* model, const char* op,
                                  const char* spec_json, const char* options_json,
                                  char** report_out);

/* ----- duopoly bundling ----- */

comag_status comag_bundling_load(const char* model_json, comag_bundling_model** out);
void comag_bundling_free(comag_bundling_model* model);

/* op: "tstar" | "pairs" | "split-check" | "split-build" | "build-upgrades" | "mdstar";
 * options per op: tstar {"variant": "market_split"|"base", "base": b?};
 * split-check {"menu1": [...], "menu2": [...]}; split-build {"bundles1": [..],
 * "bundles2": [..]}; build-upgrades/mdstar {"base": b}. */
comag_status comag_bundling_run(const comag_bundling_model* model, const char* op,
                                const char* options_json, char** report_out);

/* ----- envelope numerics ----- */

/* family_json: {"grid": [...], "members": [{"values": [...],
 * "derivatives": [...]?}, ...]}; options: {"op": "audit"|"integral"|"lipschitz",
 * "tolerance": x?} */
comag_status comag_envelope_audit(const char* family_json, const char* options_json,
                                  char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COMAG_H_ */
