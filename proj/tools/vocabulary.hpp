#pragma once

// Small bilingual medical vocabulary shared by the dataset generator and the
// scripted model used in tests and the demo server.

#include <array>
#include <string_view>

namespace kgrag::vocab {

struct Term {
    std::string_view ja;
    std::string_view en;
    std::string_view note_ja; // one-sentence description used in scripted answers
};

inline constexpr std::array<Term, 33> kTerms = {{
    {"ワルファリン", "warfarin", "ワルファリンは血液を固まりにくくする薬です。"},
    {"服用", "administration", "薬は指示どおりに服用することが大切です。"},
    {"避ける", "avoidance", "避けるべきものは医師や薬剤師に確認しましょう。"},
    {"野菜", "vegetables", "野菜にはビタミンやミネラルが多く含まれます。"},
    {"ビタミンK", "vitamin K", "ビタミンKは血液凝固に関与する栄養素です。"},
    {"糖尿病", "diabetes mellitus", "糖尿病は血糖値が慢性的に高くなる病気です。"},
    {"インスリン", "insulin", "インスリンは血糖値を下げるホルモンです。"},
    {"高血圧", "hypertension", "高血圧は脳卒中や心臓病の危険因子です。"},
    {"心筋梗塞", "myocardial infarction", "心筋梗塞は冠動脈の閉塞により心筋が壊死する病気です。"},
    {"脳卒中", "stroke", "脳卒中は脳の血管が詰まるか破れることで起こります。"},
    {"喘息", "asthma", "喘息は気道の慢性炎症による病気です。"},
    {"肺炎", "pneumonia", "肺炎は肺の感染症で発熱や咳を伴います。"},
    {"抗生物質", "antibiotics", "抗生物質は細菌感染症の治療に用いられます。"},
    {"肝膿瘍", "liver abscess", "肝膿瘍は肝臓に膿がたまる病気です。"},
    {"細菌感染", "bacterial infection", "細菌感染は抗菌薬で治療されることが多いです。"},
    {"貧血", "anemia", "貧血は赤血球やヘモグロビンが不足した状態です。"},
    {"鉄分", "iron", "鉄分はヘモグロビンの材料になります。"},
    {"甲状腺", "thyroid gland", "甲状腺は代謝を調節するホルモンを分泌します。"},
    {"関節炎", "arthritis", "関節炎は関節の痛みや腫れを引き起こします。"},
    {"骨粗鬆症", "osteoporosis", "骨粗鬆症は骨がもろくなる病気です。"},
    {"カルシウム", "calcium", "カルシウムは骨や歯の主要な成分です。"},
    {"片頭痛", "migraine", "片頭痛は拍動性の頭痛を繰り返す病気です。"},
    {"うつ病", "depressive disorder", "うつ病は気分の落ち込みが続く病気です。"},
    {"睡眠", "sleep", "十分な睡眠は健康の維持に欠かせません。"},
    {"アレルギー", "hypersensitivity", "アレルギーは免疫の過剰な反応です。"},
    {"ワクチン", "vaccines", "ワクチンは感染症の予防に役立ちます。"},
    {"妊娠", "pregnancy", "妊娠中は服用できる薬が限られます。"},
    {"腎臓", "kidney", "腎臓は血液をろ過して尿を作ります。"},
    {"コレステロール", "cholesterol", "コレステロールが高いと動脈硬化が進みます。"},
    {"アスピリン", "aspirin", "アスピリンは解熱鎮痛作用と抗血小板作用を持ちます。"},
    {"出血", "hemorrhage", "出血が止まらない場合は医療機関を受診してください。"},
    {"遺伝子", "genes", "遺伝子は体の設計図となる情報です。"},
    {"タンパク質", "proteins", "タンパク質は筋肉や酵素の材料です。"},
}};

// Japanese renderings of knowledge-base names that appear as relation objects.
struct Name {
    std::string_view en;
    std::string_view ja;
};

inline constexpr std::array<Name, 3> kExtraNames = {{
    {"coumarin anticoagulant", "クマリン系の抗凝固薬"},
    {"anticoagulant", "抗凝固薬"},
    {"blood coagulation", "血液凝固"},
}};

inline constexpr std::array<std::string_view, 24> kEnglishFiller = {
    "the", "patient", "treatment", "risk", "symptoms", "doctor", "may", "should", "effects", "common",
    "clinical", "study", "people", "often", "health", "level", "condition", "body", "cause", "care",
    "medicine", "blood", "daily", "long"};

} // namespace kgrag::vocab
