"""Regenerate the synthetic fixture corpus (corpus.jsonl).

12 cohort users plus 2 background authors, ~120 entries spanning one
year. Texts are written against the mock backend's keyword rules so the
offline pipeline exercises every disposition: removal markers, URL-only
bodies, irrelevant chatter, an unparseable relevance answer, an
unparseable extraction answer, two fully quarantined users, post-comment
pairs of every relation type, and two broken dump lines.

Run: python tests/fixtures/make_corpus.py
"""

from __future__ import annotations

import json
from pathlib import Path

BASE = 1575158400  # 2019-12-01T00:00:00Z
OUT = Path(__file__).parent / "corpus.jsonl"

# (id, author, day, hour, title, selftext) — posts; title=None means selftext-only
POSTS = [
    ("p_ash_01", "ash_ember", 13, 9, "My personality feels broken",
     "I have felt hopeless about who I am for the past half decade. Nothing is improving."),
    ("p_ash_02", "ash_ember", 27, 10, "Still the same story",
     "It has been 5 years of this and I still feel hopeless most days."),
    ("p_ash_03", "ash_ember", 45, 8, "Worthless again",
     "I feel worthless whenever I compare myself to anyone at work."),
    ("p_ash_04", "ash_ember", 80, 21, "Numb", "I feel empty inside even on good days."),
    ("p_ash_05", "ash_ember", 120, 22, "Rough night",
     "I spent the evening crying over nothing in particular."),
    ("p_ash_06", "ash_ember", 160, 7, "Drained",
     "There is no energy left in me after the smallest chores."),
    ("p_ash_07", "ash_ember", 200, 23, "Heavy",
     "The depression is heavier this month and I cannot shake it."),
    ("p_ash_08", "ash_ember", 240, 6, "Tired of this",
     "Feeling hopeless again, like the floor keeps dropping."),
    ("p_ash_10", "ash_ember", 320, 12, "Set back",
     "A small mistake and I feel worthless all over again."),
    ("p_ash_11", "ash_ember", 350, 9, "Finally",
     "My sourdough starter doubled overnight, small kitchen win!"),
    ("p_ash_12", "ash_ember", 352, 18, "Clearing out",
     "Selling my old monitor, barely used, pickup only."),
    ("p_ash_13", "ash_ember", 355, 20, "Flat",
     "Anxious undercurrent all day, money worries flatten everything lately."),

    ("p_briar_01", "briar_holt", 5, 8, "Panic at the grocery store",
     "Another panic attack out of nowhere, heart racing in the aisle."),
    ("p_briar_02", "briar_holt", 40, 9, "Waiting rooms",
     "Feeling anxious about every bill that lands this month."),
    ("p_briar_03", "briar_holt", 75, 7, "It happened again",
     "A panic episode hit two weeks ago and I am still rattled."),
    ("p_briar_04", "briar_holt", 110, 22, "Crowds",
     "My social anxiety makes the office kitchen feel like a stage."),
    ("p_briar_06", "briar_holt", 150, 10, "On edge",
     "Anxious all week about the rent increase."),
    ("p_briar_07", "briar_holt", 190, 21, "Spiral",
     "The panic builds every time my chest tightens."),
    ("p_briar_08", "briar_holt", 230, 9, "Numbers",
     "I get anxious checking my bank balance, the financial insecurity is constant."),
    ("p_briar_09", "briar_holt", 270, 12, "Advice",
     "Anyone recommend a laptop under 500 for coding?"),
    ("p_briar_10", "briar_holt", 310, 8, "Meetings",
     "Presentation anxiety wrecked my morning again."),
    ("p_briar_11", "briar_holt", 330, 19, "Tight chest",
     "Anxious and restless since the lease email."),
    ("p_briar_12", "briar_holt", 358, 7, "Checkout lines",
     "Panic crept in at checkout today, had to leave the cart."),

    ("p_cedar_01", "cedar_lane", 8, 9, "Deadlines stack up",
     "Work stress has been grinding me down for months."),
    ("p_cedar_02", "cedar_lane", 50, 10, "Same grind",
     "The job stress follows me home every evening."),
    ("p_cedar_03", "cedar_lane", 90, 11, "Venting",
     "<b>I feel</b> anxious!!! see https://help.example/z"),
    ("p_cedar_04", "cedar_lane", 130, 12, "Too much",
     "Completely overwhelmed by the backlog and the inbox."),
    ("p_cedar_06", "cedar_lane", 170, 14, "No letup", "Stress headaches almost daily now."),
    ("p_cedar_07", "cedar_lane", 210, 15, "Cooked",
     "Proper burnout, I stare at the screen and nothing happens."),
    ("p_cedar_08", "cedar_lane", 250, 16, "Crunch",
     "Release week stress again, sleep is optional apparently."),
    ("p_cedar_09", "cedar_lane", 290, 17, "Gear question",
     "What lens should I get for landscape shots?"),
    ("p_cedar_10", "cedar_lane", 315, 18, "Swamped",
     "Overwhelmed again, the queue never drains."),
    ("p_cedar_11", "cedar_lane", 335, 19, "Monday already",
     "The stress knot in my shoulders is back."),
    ("p_cedar_12", "cedar_lane", 359, 20, "Wired",
     "Anxious before the quarterly review tomorrow."),

    ("p_dell_01", "dell_rowan", 10, 8, "Never good enough",
     "My perfectionism turns every small task into a test I can fail."),
    ("p_dell_02", "dell_rowan", 55, 9, "Old habits",
     "The perfectionism has been with me since college, every draft feels unfinished."),
    ("p_dell_03", "dell_rowan", 95, 10, "Rewrote it five times",
     "Perfectionism ate my whole weekend again."),
    ("p_dell_04", "dell_rowan", 135, 11, "Low after review",
     "My self-esteem tanks every time I miss a deadline."),
    ("p_dell_06", "dell_rowan", 175, 13, "Checklist loops",
     "I re-check everything three times, the perfectionism is exhausting."),
    ("p_dell_07", "dell_rowan", 215, 14, "Stuck on details",
     "Perfectionism means I never ship anything on time."),
    ("p_dell_08", "dell_rowan", 255, 15, "Good game",
     "Great match last night, what a finish!"),
    ("p_dell_09", "dell_rowan", 295, 16, "Draft nine",
     "The perfectionism spiral claimed another report."),
    ("p_dell_10", "dell_rowan", 325, 17, "Comparisons",
     "My self-esteem dips whenever the team demos their work."),
    ("p_dell_11", "dell_rowan", 357, 18, "Polishing forever",
     "Perfectionism again, I missed the deadline polishing footnotes."),

    ("p_elm_01", "elm_hart", 12, 9, "Quiet weekends",
     "I feel lonely most evenings, the flat is too quiet."),
    ("p_elm_02", "elm_hart", 60, 10, "Counting days",
     "Been lonely all year, even in crowded rooms."),
    ("p_elm_03", "elm_hart", 100, 11, "Hard to say",
     "Feeling odd lately, zzzmaybe, cannot describe it."),
    ("p_elm_06", "elm_hart", 180, 14, "Echo",
     "Lonely again tonight, scrolling instead of sleeping."),
    ("p_elm_07", "elm_hart", 220, 15, "Benches",
     "I sit alone at lunch and the lonely feeling follows me back."),
    ("p_elm_08", "elm_hart", 260, 16, "Weekend project", "Fixed my bike chain, small win."),
    ("p_elm_09", "elm_hart", 331, 17, "Same old",
     "The lonely evenings are stacking up again."),
    ("p_elm_10", "elm_hart", 356, 18, "Year end",
     "Still lonely, still pretending it is fine."),

    ("p_fen_01", "fen_marsh", 15, 9, "Grey months",
     "The depression has been sitting on me for months now."),
    ("p_fen_03", "fen_marsh", 70, 11, None, "[removed]"),
    ("p_fen_04", "fen_marsh", 115, 12, "Job hunt",
     "Unemployment plus depression is a bad loop."),
    ("p_fen_06", "fen_marsh", 155, 14, "Leaky",
     "Ended up crying in the car before the interview."),
    ("p_fen_07", "fen_marsh", 195, 15, "Still grey",
     "The depression fog has not lifted this week."),
    ("p_fen_08", "fen_marsh", 235, 16, "Desk clear out",
     "Selling a spare monitor stand, cheap."),
    ("p_fen_09", "fen_marsh", 275, 17, "Running on fumes",
     "No energy for anything after rejection emails."),
    ("p_fen_10", "fen_marsh", 352, 18, "December again",
     "Depression and the dark evenings are a rough mix."),

    ("p_gorse_01", "gorse_vale", 18, 23, "3am club",
     "The insomnia keeps me staring at the ceiling every night."),
    ("p_gorse_02", "gorse_vale", 65, 1, "Shift wreck",
     "Insomnia after night shifts, my schedule is rubble."),
    ("p_gorse_03", "gorse_vale", 105, 2, "Cannot word this",
     "zzzbadformat my insomnia brain refuses to explain itself."),
    ("p_gorse_04", "gorse_vale", 145, 3, "Awake again",
     "Insomnia won again, three hours at best."),
    ("p_gorse_06", "gorse_vale", 185, 0, "Clockwatching",
     "Insomnia maths: if I sleep now I get four hours."),
    ("p_gorse_07", "gorse_vale", 225, 12, "Rise time",
     "My sourdough proofed perfectly overnight."),
    ("p_gorse_08", "gorse_vale", 265, 2, "Sand eyes",
     "The insomnia leaves my eyes full of sand by noon."),
    ("p_gorse_09", "gorse_vale", 353, 1, "Lights off, brain on",
     "Insomnia again, podcasts stopped helping."),

    ("p_hazel_01", "hazel_mott", 22, 21, "Old ghosts",
     "The childhood trauma nightmares are back since last winter."),
    ("p_hazel_02", "hazel_mott", 68, 22, "Family dinners",
     "Visiting home stirs the old trauma up for days."),
    ("p_hazel_03", "hazel_mott", 108, 23, "4am", "Nightmares again, same hallway, same door."),
    ("p_hazel_04", "hazel_mott", 148, 20, "Roots",
     "Therapy is slowly untangling the childhood trauma."),
    ("p_hazel_06", "hazel_mott", 188, 21, "Startled",
     "Loud doors still spike the trauma response."),
    ("p_hazel_07", "hazel_mott", 228, 22, "Sleep hygiene", "New routine, same nightmares."),
    ("p_hazel_08", "hazel_mott", 268, 10, "Tech question",
     "Anyone recommend a laptop bag that fits a 16 inch?"),
    ("p_hazel_09", "hazel_mott", 354, 21, "Progress maybe",
     "Named the trauma out loud for the first time."),

    ("p_ivy_01", "ivy_glen", 58, 12, "Empty calendar",
     "Feeling lonely again, nobody texts first."),
    ("p_ivy_02", "ivy_glen", 98, 13, "Echo chamber",
     "Lonely enough that I talk to the kettle."),
    ("p_ivy_03", "ivy_glen", 138, 14, "Skipped again",
     "They met up without me, the lonely sting is sharp."),
    ("p_ivy_04", "ivy_glen", 178, 15, "Winter blues",
     "Lonely season, short days, long evenings."),
    ("p_ivy_08", "ivy_glen", 218, 19, "Match day",
     "Great match last night, extra time madness!"),

    ("p_juniper_01", "juniper_ash", 25, 9, "Fried",
     "Burnout hit hard this sprint, I have nothing left."),
    ("p_juniper_02", "juniper_ash", 72, 10, "Crashed",
     "I burned out properly two weeks ago and I am still flat."),
    ("p_juniper_03", "juniper_ash", 112, 11, None,
     "https://wellness.example.org/resources"),
    ("p_juniper_04", "juniper_ash", 152, 12, "Buried",
     "Overwhelmed by the handover, three roles in one."),
    ("p_juniper_06", "juniper_ash", 192, 14, "Cold coffee",
     "The burnout makes even easy tickets feel like cliffs."),
    ("p_juniper_07", "juniper_ash", 232, 15, "Photo kit",
     "What lens pairs well with a 50mm for street shots?"),
    ("p_juniper_08", "juniper_ash", 351, 16, "Recovery plan",
     "Trying to pace myself out of this burnout."),

    ("p_kestrel_01", "kestrel_dun", 30, 2, "Scared of myself",
     "I keep thinking about self-harm and I do not know how to stop."),
    ("p_kestrel_02", "kestrel_dun", 74, 3, "Piling up",
     "Everything piles up and I think about how to end it all."),
    ("p_kestrel_03", "kestrel_dun", 114, 1, "Mornings",
     "Some mornings I wake up and just want to die."),
    ("p_kestrel_04", "kestrel_dun", 154, 2, "After work",
     "I had urges to hurt myself again after work."),
    ("p_kestrel_05", "kestrel_dun", 194, 3, "Louder",
     "The suicidal thoughts are louder this week."),
    ("p_kestrel_06", "kestrel_dun", 234, 0, "Last year",
     "I made a plan to kill myself last year and the memory scares me."),
    ("p_kestrel_07", "kestrel_dun", 274, 1, "Holding on",
     "I keep the overdose thoughts at bay but it is hard."),

    ("p_larch_01", "larch_fell", 35, 2, "Night urges",
     "The self-harm urges came back last night."),
    ("p_larch_02", "larch_fell", 78, 3, "Quiet plans",
     "I caught myself planning to end my life and called nobody."),
    ("p_larch_03", "larch_fell", 118, 1, "Most days",
     "Most days I just want to die quietly."),
    ("p_larch_04", "larch_fell", 158, 23, "Stopped fighting",
     "Lately I feel like nothing matters anymore and I stopped fighting it."),
    ("p_larch_05", "larch_fell", 198, 2, "Back again", "My suicidal spiral is back."),

    ("p_moss_01", "moss_brook", 33, 9, "New here", "New here, feeling anxious about posting."),
    ("p_moss_02", "moss_brook", 99, 10, "Checking in", "Lonely lurker checking in."),
]

# (id, author, day, hour, body, parent_post_id or explicit t1_/t3_ ref)
COMMENTS = [
    ("c_ash_09", "ash_ember", 23, 4,
     "zzzweird I feel the same anxiety every day and nobody sees it.", "p_hazel_01"),
    ("c_ash_14", "ash_ember", 41, 11,
     "me too, therapy waitlists here are endless.", "p_briar_02"),
    ("c_briar_05", "briar_holt", 13, 14,
     "sorry you're going through this, therapy helped me more than I expected.", "p_ash_01"),
    ("c_cedar_05", "cedar_lane", 61, 13,
     "me too, the stress keeps piling up this quarter.", "p_ivy_01"),
    ("c_dell_05", "dell_rowan", 26, 12,
     "i agree, perfectionism feeds the burnout cycle.", "p_juniper_01"),
    ("c_elm_04", "elm_hart", 9, 12,
     "i agree, burnout at work wrecked my mood too.", "p_cedar_01"),
    ("c_elm_05", "elm_hart", 63, 13,
     "Replying here because my anxiety relates to this thread.", "t1_c_ivy_05"),
    ("c_fen_02", "fen_marsh", 20, 10, "[deleted]", "p_ash_01"),
    ("c_fen_05", "fen_marsh", 11, 13,
     "stay strong, my depression took years to ease.", "p_dell_01"),
    ("c_gorse_05", "gorse_vale", 16, 12,
     "honestly that's on you, skipping therapy won't help anyone.", "p_fen_01"),
    ("c_hazel_05", "hazel_mott", 13, 2,
     "i'm here for you, trauma recovery is slow but real.", "p_elm_01"),
    ("c_ivy_05", "ivy_glen", 6, 16,
     "me too, my anxiety spikes at night in queues too.", "p_briar_01"),
    ("c_ivy_06", "ivy_glen", 31, 17,
     "please talk to a therapist, you matter more than this week feels.", "p_kestrel_01"),
    ("c_ivy_07", "ivy_glen", 91, 18,
     "my anxiety is back again and this thread resonates.", "p_moss_01"),
    ("c_juniper_05", "juniper_ash", 19, 13,
     "what mattress do you use, the stress is ruining my sleep.", "p_gorse_01"),
    ("c_larch_06", "larch_fell", 28, 3,
     "I relate. Most days I want to die too.", "p_ash_02"),
    ("c_nettle_01", "nettle_frost", 44, 11, "me too honestly.", "p_ash_01"),
]

BAD_LINES = {
    20: '{"id": "broken_line", "author": "nobody"',
    60: json.dumps({
        "id": "p_noauthor",
        "title": "Help",
        "selftext": "I feel anxious writing this.",
        "created_utc": BASE + 49 * 86400,
        "subreddit": "mentalhealth",
    }),
}


def _stamp(day: int, hour: int) -> int:
    return BASE + day * 86400 + hour * 3600


def build_lines() -> list[str]:
    objects = []
    for entry_id, author, day, hour, title, selftext in POSTS:
        obj = {
            "id": entry_id,
            "author": author,
            "created_utc": _stamp(day, hour),
            "subreddit": "depression" if author in ("ash_ember", "fen_marsh") else "mentalhealth",
            "selftext": selftext,
        }
        if title is not None:
            obj["title"] = title
        objects.append((day, hour, entry_id, obj))
    for entry_id, author, day, hour, body, parent in COMMENTS:
        parent_id = parent if parent.startswith(("t1_", "t3_")) else f"t3_{parent}"
        objects.append(
            (day, hour, entry_id, {
                "id": entry_id,
                "author": author,
                "created_utc": _stamp(day, hour),
                "subreddit": "mentalhealth",
                "body": body,
                "parent_id": parent_id,
            })
        )
    objects.sort(key=lambda item: (item[0], item[1], item[2]))
    lines = [json.dumps(obj, ensure_ascii=False) for _, _, _, obj in objects]
    for index in sorted(BAD_LINES):
        lines.insert(index, BAD_LINES[index])
    return lines


def main() -> None:
    lines = build_lines()
    OUT.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {OUT} ({len(lines)} lines)")


if __name__ == "__main__":
    main()
