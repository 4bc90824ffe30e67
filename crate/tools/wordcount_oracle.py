#!/usr/bin/env python3
"""Reference oracle for the word-count semantics used across this toolkit.

Rule-for-rule port of NLTK's `NLTKWordTokenizer` (the regex-based Treebank
tokenizer behind `nltk.tokenize.word_tokenize`, nltk 3.8 rule set), composed
with a line/period sentence splitter, followed by the punctuation-substring
exclusion check (`token in string.punctuation`, which is a *substring* test
in Python).

This script is the independent reference the Rust implementation is held to.
It regenerates the committed golden corpus:

    python3 tools/wordcount_oracle.py > crates/core/tests/golden/wordcount_golden.jsonl

Given an argument, it tokenizes stdin instead (handy for spot checks):

    echo "don't stop..." | python3 tools/wordcount_oracle.py -
"""

import json
import re
import string
import sys

# ---------------------------------------------------------------------------
# Treebank-style destructive tokenizer (ordered rewrite rules + split).
# ---------------------------------------------------------------------------

STARTING_QUOTES = [
    (re.compile("([«“‘„]|[`]+)", re.U), r" \1 "),
    (re.compile(r"^\""), r"``"),
    (re.compile(r"(``)"), r" \1 "),
    (re.compile(r"([ \(\[{<])(\"|\'{2})"), r"\1 `` "),
    (re.compile(r"(?i)(\')(?!re|ve|ll|m|t|s|d|n)(\w)\b", re.U), r"\1 \2"),
]

ENDING_QUOTES = [
    (re.compile("([»”’])", re.U), r" \1 "),
    (re.compile(r"''"), " '' "),
    (re.compile(r'"'), " '' "),
    (re.compile(r"([^' ])('[sS]|'[mM]|'[dD]|') "), r"\1 \2 "),
    (re.compile(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) "), r"\1 \2 "),
]

PUNCTUATION = [
    (re.compile(r'([^\.])(\.)([\]\)}>"\'' "»”’ " r"]*)\s*$", re.U), r"\1 \2 \3 "),
    (re.compile(r"([:,])([^\d])"), r" \1 \2"),
    (re.compile(r"([:,])$"), r" \1 "),
    (re.compile(r"\.{2,}", re.U), r" \g<0> "),
    (re.compile(r"[;@#$%&]"), r" \g<0> "),
    (re.compile(r'([^\.])(\.)([\]\)}>"\']*)\s*$'), r"\1 \2\3 "),
    (re.compile(r"[?!]"), r" \g<0> "),
    (re.compile(r"([^'])' "), r"\1 ' "),
    (re.compile(r"[*]", re.U), r" \g<0> "),
]

PARENS_BRACKETS = (re.compile(r"[\]\[\(\)\{\}\<\>]"), r" \g<0> ")

DOUBLE_DASHES = (re.compile(r"--"), r" -- ")

CONTRACTIONS2 = [
    re.compile(r"(?i)\b(can)(not)\b"),
    re.compile(r"(?i)\b(d)('ye)\b"),
    re.compile(r"(?i)\b(gim)(me)\b"),
    re.compile(r"(?i)\b(gon)(na)\b"),
    re.compile(r"(?i)\b(got)(ta)\b"),
    re.compile(r"(?i)\b(lem)(me)\b"),
    re.compile(r"(?i)\b(more)('n)\b"),
    re.compile(r"(?i)\b(wan)(na)(?=\s)"),
]

CONTRACTIONS3 = [
    re.compile(r"(?i) ('t)(is)\b"),
    re.compile(r"(?i) ('t)(was)\b"),
]


def treebank_tokenize(text):
    for regexp, substitution in STARTING_QUOTES:
        text = regexp.sub(substitution, text)
    for regexp, substitution in PUNCTUATION:
        text = regexp.sub(substitution, text)
    regexp, substitution = PARENS_BRACKETS
    text = regexp.sub(substitution, text)
    regexp, substitution = DOUBLE_DASHES
    text = regexp.sub(substitution, text)
    text = " " + text + " "
    for regexp, substitution in ENDING_QUOTES:
        text = regexp.sub(substitution, text)
    for regexp in CONTRACTIONS2:
        text = regexp.sub(r" \1 \2 ", text)
    for regexp in CONTRACTIONS3:
        text = regexp.sub(r" \1 \2 ", text)
    return text.split()


# Sentence boundaries: every line break, plus ". " followed by an ASCII
# uppercase letter (the period stays with the left sentence).
SENT_BOUNDARY = re.compile(r"(?<=\.)[ \t]+(?=[A-Z])")


def split_sentences(text):
    sentences = []
    for line in text.split("\n"):
        sentences.extend(SENT_BOUNDARY.split(line))
    return [s for s in sentences if s.strip()]


def tokenize(text):
    tokens = []
    for sentence in split_sentences(text):
        tokens.extend(treebank_tokenize(sentence))
    return tokens


def count_words(text):
    return len([w for w in tokenize(text) if w not in string.punctuation])


# ---------------------------------------------------------------------------
# Golden corpus.
# ---------------------------------------------------------------------------

CORPUS = [
    # Conversational answers with contractions and clitics.
    "Yes, I'd be happy to help you improve your handwriting skills!",
    "I'd be happy to help. To improve your handwriting, practice regularly, focus on posture and grip, and try using guidelines or a light box to help you stay within lines.",
    "I'm trying to teach myself to have nicer handwriting. Can you help?",
    "don't stop...",
    "I'm sure you'll do great.",
    "We're not going to make it, are we?",
    "They've been waiting since noon.",
    "She'll call when she's ready.",
    "He'd rather walk than drive.",
    "It's not what you think it is.",
    "You aren't listening, and that isn't fair.",
    "I can't believe we won't see them again.",
    "Shouldn't we ask first?",
    "Wouldn't it be nice?",
    "That wasn't my idea, I swear.",
    "DON'T SHOUT AT ME!",
    "I'M HERE AND I CAN'T LEAVE.",
    "it's fine, IT'S FINE, It'S fine.",
    "The dog wagged its tail.",
    "Who's there? It's John's brother.",
    "James' car is older than Chris's bike.",
    "The girls' locker room is upstairs.",
    "The Joneses' house has a red door.",
    # MacIntyre contraction splits.
    "I cannot say I blame you.",
    "You cannot be serious!",
    "Gimme the keys, please.",
    "We're gonna be late.",
    "I gotta run now.",
    "Lemme think about it.",
    "He knows more'n he lets on.",
    "D'ye ken the way to the loch?",
    "'Tis a fine morning.",
    "'Twas the night before the storm.",
    "I wanna go home now.",
    "Do you wanna come along?",
    # Quotes, single and double.
    '"Hello," she said.',
    'She said, "Hello there."',
    'He shouted "wait" and ran.',
    '"Why?" he asked.',
    'The sign read "closed for winter" in faded paint.',
    "He called it 'temporary' and moved on.",
    "The word 'serendipity' has no rhyme.",
    "'I am here,' she whispered.",
    "'A rose is a rose,' he quoted.",
    'They wrote "it depends" on every answer.',
    '"One." "Two." "Three."',
    'Start with "first principles" and work outward.',
    "The file is named 'notes_v2' on the drive.",
    # Colons, commas, semicolons.
    "We need eggs, milk, butter, and flour.",
    "The total came to 1,250 dollars.",
    "Call me at 3:30 tomorrow.",
    "The ratio was 2:1 in our favor.",
    "Here is the plan: we leave at dawn.",
    "One thing matters: consistency.",
    "I came; I saw; I left early.",
    "First, gather your tools; second, read the manual; third, begin.",
    "The sample sizes were 10, 100, and 1,000,000.",
    "Rome, Paris, and Madrid: three capitals, one trip.",
    # Sentence-final periods and multi-sentence texts.
    "It rained all day. The river rose by evening.",
    "Knock twice. Wait for the signal. Then enter.",
    "The test passed. The build finished. We shipped it.",
    "Mind the gap. Stand clear of the doors.",
    "He left. She stayed.",
    "Think first. Act second. Review third.",
    "The answer is no. Please stop asking.",
    "Results improved. Costs fell. Morale rose.",
    # Ellipses and dashes.
    "Well... I suppose so.",
    "It trailed off into silence...",
    "Wait.... what happened?",
    "The road went on and on -- mile after mile.",
    "She paused--then smiled.",
    "True happiness -- if it exists -- is quiet.",
    "Hmm... maybe... perhaps not.",
    # Parentheses, brackets, braces.
    "The results (see Table 3) were inconclusive.",
    "Add the flag [verbose] to see details.",
    "The set {1, 2, 3} has three members.",
    "Use angle brackets <tag> for markup.",
    "He (finally) admitted it (under pressure).",
    "The citation [12] covers the proof.",
    "Nested (like (this)) structures confuse parsers.",
    # Symbols kept or split.
    "The fee is $40 per person.",
    "Growth hit 12% last quarter.",
    "Email me at contact@example.org today.",
    "Use the #hashtag sparingly.",
    "Profits & losses balance out.",
    "The password contains @ and % signs.",
    "Rice costs $1.50 per pound; beans cost less.",
    "A 50% deposit holds the room.",
    # Asterisks and markdown-ish bullets.
    "* Choose the right tools: a good pen and smooth paper.",
    "* Practice regularly: set aside time each day.",
    "The *emphasis* was unmistakable.",
    "**Bold claims** need bold evidence.",
    # Questions and exclamations.
    "Really?!",
    "What time is it?",
    "Stop right there!",
    "Are you sure? Absolutely sure?",
    "Incredible! Simply incredible!",
    "How did it end? Nobody knows.",
    # Hyphenated words stay whole.
    "The well-known author gave a so-so speech.",
    "Use a state-of-the-art, battle-tested approach.",
    "Her mother-in-law runs a twenty-four-hour diner.",
    "It was a last-minute, off-the-cuff remark.",
    # Abbreviation-free prose of varying length.
    "The quick brown fox jumps over the lazy dog.",
    "A journey of a thousand miles begins with a single step.",
    "All that glitters is not gold.",
    "Brevity is the soul of wit.",
    "The early bird catches the worm, but the second mouse gets the cheese.",
    "Measure twice, cut once.",
    "Practice makes perfect, or so they say.",
    "Actions speak louder than words.",
    "Every cloud has a silver lining.",
    "Fortune favors the bold.",
    "Honesty is the best policy.",
    "Knowledge is power, and power corrupts budgets.",
    "Look before you leap.",
    "No news is good news.",
    "Still waters run deep.",
    "The pen is mightier than the sword.",
    "Time heals most wounds and dulls the rest.",
    "Two heads are better than one.",
    "When in doubt, leave it out.",
    "You reap what you sow.",
    # Instruction-style prompts.
    "Write a short story about a lighthouse keeper who discovers a message in a bottle.",
    "Explain the difference between weather and climate.",
    "List five ways to reduce household waste.",
    "Summarize the plot of your favorite novel.",
    "Describe how photosynthesis works.",
    "Give me three tips for public speaking.",
    "Compare cats and dogs as apartment pets.",
    "Draft an apology email for a missed meeting.",
    "Outline a beginner's workout plan.",
    "Suggest a menu for a vegetarian dinner party.",
    "Tell me about the history of the printing press.",
    "What are the main causes of inflation?",
    "How do vaccines train the immune system?",
    "Why is the sky blue during the day and red at sunset?",
    "Translate the phrase into plain language for a child.",
    # Model-answer style paragraphs.
    "To improve your posture, sit with your feet flat on the floor. Keep your shoulders relaxed and your screen at eye level.",
    "Improving your handwriting takes practice, patience, and some guidance. Here are some tips to get you started:",
    "First, warm up with simple strokes. Second, slow down and form each letter deliberately. Third, review your work and note the letters that wobble.",
    "Here are a few ideas: try a weekly budget, cook at home more often, and cancel unused subscriptions.",
    "Yes, absolutely! Stretching before exercise reduces the risk of injury and improves flexibility.",
    "There are three main approaches. The first is cheapest. The second is fastest. The third balances both.",
    "Consider the following: a checklist keeps you honest, a timer keeps you moving, and a log keeps you learning.",
    "In short, the answer depends on your goals, your budget, and your timeline.",
    # Numbers, units, ranges.
    "The recipe needs 2 cups of flour and 1 cup of sugar.",
    "The marathon is 26.2 miles long.",
    "Water boils at 100 degrees Celsius at sea level.",
    "The meeting runs from 9 to 11 in room 204.",
    "Version 2.0 shipped with 14 fixes.",
    "He ran 5 kilometers in 22 minutes.",
    "The temperature dropped to -5 overnight.",
    "Chapter 7, page 132, paragraph 4.",
    "The box weighs 3.5 kilograms when full.",
    "Between 40 and 60 guests are expected.",
    # Mixed punctuation stress cases.
    "Wait -- you said Tuesday, right?",
    "The motto ('measure, then cut') served us well.",
    'Was it "done" or merely "declared done"?',
    "Hold on... are you (seriously) quitting?!",
    "The answer, if you must know, is no.",
    "Yes; no; maybe -- all three at once.",
    "A strange list: apples, pears, & plums.",
    "Stop! Think... then speak.",
    "Is it 5:45 already? Time flies.",
    "He muttered something about 'deadlines' and left.",
    "Footnotes [1], [2], and [3] cite the same source.",
    "Her reply ended with an ellipsis...",
    "One, two, three -- go!",
    "The sign said: 'No entry after 10:00.'",
    "Quote of the day: \"Simplicity scales.\"",
    # Clitic pile-ups and tricky apostrophes.
    "It's John's turn, isn't it?",
    "We'd've gone if we'd known.",
    "Y'all come back now!",
    "Rock 'n' roll never dies.",
    "The class of '99 reunited last summer.",
    "O'Brien's report cites D'Angelo's data.",
    "'ello, guv'nor!",
    "That's the '80s for you.",
    # Punctuation-only and tiny inputs.
    "!",
    "?",
    ".",
    ",",
    ";",
    "...",
    "!!!",
    "?!",
    "--",
    "()",
    "hello",
    "Hi.",
    "No!",
    "Go?",
    "a b c",
    "x",
    # Whitespace variety.
    "  leading and trailing spaces  ",
    "tabs\tbetween\twords",
    "line one\nline two\nline three",
    "a sentence split\nacross two lines.",
    "double  spaces   between    words",
    # Longer multi-line, bullet-heavy responses.
    "I'd be happy to help you improve your handwriting. Here are a few tips to get you started:\n* Choose the right tools: use a pen with good grip and smooth ink flow.\n* Practice regularly: set aside time each day to practice writing.\n* Focus on posture and grip: keep your hand steady and your fingers relaxed.",
    "Improving your handwriting takes practice, patience, and some guidance.\n1. **Choose the right tools**: invest in a few good quality pens.\n2. **Practice basic strokes**: focus on mastering loops and lines.\n3. **Be patient**: progress comes slowly, then all at once.",
    "Here is a simple plan:\n- Monday: stretch and walk.\n- Wednesday: light weights.\n- Friday: a longer run, if the weather holds.",
    "Dear team,\nThe launch moved to Thursday. Please update your calendars.\nThanks,\nMorgan",
    "Step 1: open the valve.\nStep 2: check the gauge.\nStep 3: log the reading at 8:00 and again at 20:00.",
    # Sentences exercising the final-period rule with trailing quotes/brackets.
    'He said "it works."',
    "The note ended with 'soon.'",
    "It was labeled (fragile).",
    "See the appendix [A].",
    "The last word was 'goodbye.'",
    'She titled it "Done."',
    # Currency, percent, measurements in context.
    "Shares fell 8% to $92.50 by noon.",
    "The invoice lists $1,200 for labor & $300 for parts.",
    "A #2 pencil costs $0.25 at the co-op.",
    "Humidity stayed near 85% all week.",
    # Colon-before-letter vs colon-before-digit.
    "Note: the colon here splits.",
    "Scores were 10:3, 7:2, and 4:4.",
    "Agenda: introductions, demos, questions.",
    "Ratio 16:9 suits most screens.",
    # Starting-quote edge cases.
    '"Begin at the beginning," the King said.',
    "('inner voice') is how she described it.",
    '["quoted inside brackets"]',
    "A 'quoted' word mid-sentence.",
    '"Double" and \'single\' in one line.',
    # Periods inside tokens (no split mid-sentence).
    "The package version is 1.2.3 today.",
    "Visit example.com for details.",
    "The file config.yaml overrides defaults.",
    "Pi is roughly 3.14159 in most work.",
    # Uppercase-after-period boundary cases.
    "It works. Trust the process.",
    "Done. Next question, please.",
    "I agree. However, the budget disagrees.",
    "Ship it. Fix it. Ship it again.",
    # Miscellaneous texture.
    "The cafe menu lists espresso, cortado, and flat white.",
    "Silence, then applause, then silence again.",
    "A small boat, a wide river, and no map.",
    "Morning fog erased the far bank of the river.",
    "The committee agreed to disagree, politely.",
    "Nothing moved except the second hand of the clock.",
    "Rain tapped the window like an impatient visitor.",
    "The ledger balanced on the third try.",
    "Every shortcut added a week to the schedule.",
    "The last train left at midnight, empty.",
    "Dust settled on the unused piano keys.",
    "Their argument dissolved into laughter.",
    "The recipe survived four generations unchanged.",
    "A single lamp lit the entire workshop.",
    "The map showed a road that no longer exists.",
    "Volunteers sorted donations until well past dark.",
    "The bridge hummed under the evening traffic.",
    "Old keys filled the drawer, locks long forgotten.",
    "The garden outgrew its fence by June.",
    "A borrowed ladder started the whole affair.",
]


def main():
    if len(sys.argv) > 1:
        text = sys.stdin.read()
        print(json.dumps({"tokens": tokenize(text), "count": count_words(text)}))
        return

    # Sanity anchors for the counting semantics.
    assert count_words(CORPUS[0]) == 12, count_words(CORPUS[0])
    assert count_words(CORPUS[1]) == 31, count_words(CORPUS[1])
    assert tokenize("don't stop...") == ["do", "n't", "stop", "..."]
    assert count_words("") == 0

    for i, text in enumerate(CORPUS):
        record = {
            "id": f"g{i:03d}",
            "text": text,
            "tokens": tokenize(text),
            "count": count_words(text),
        }
        sys.stdout.write(json.dumps(record, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
